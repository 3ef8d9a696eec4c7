#ifndef CFGEN_EXPLAINER_HPP
#define CFGEN_EXPLAINER_HPP

#include <set>
#include <string>

#include "cfgen/core.hpp"

namespace cfgen {

class RationaleExtractor {
 public:
  virtual ~RationaleExtractor() = default;
  // Output satisfies the Rationales invariants for `inst`. Throws
  // EmptyRationaleError when no sentence qualifies.
  virtual Rationales extract(const Instance& inst) const = 0;
};

// Marks as token rationales the evidence tokens whose lowercase form matches
// a claim content word, plus tokens matching a content word shared by two or
// more evidence items (bridge tokens). A sentence is masked when it owns at
// least one token rationale.
class HeuristicExtractor : public RationaleExtractor {
 public:
  HeuristicExtractor() = default;
  Rationales extract(const Instance& inst) const override;
};

// Passes through gold rationale annotations attached to the instance.
class OracleExtractor : public RationaleExtractor {
 public:
  Rationales extract(const Instance& inst) const override;
};

// Fixed stop-word list shipped with the repo.
const std::set<std::string>& stopwords();

// Lowercased non-stopword word tokens (punctuation excluded).
std::set<std::string> content_words(const std::string& text);

}  // namespace cfgen

#endif  // CFGEN_EXPLAINER_HPP
