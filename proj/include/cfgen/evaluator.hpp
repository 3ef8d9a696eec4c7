#ifndef CFGEN_EVALUATOR_HPP
#define CFGEN_EVALUATOR_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cfgen/backends.hpp"
#include "cfgen/core.hpp"

namespace cfgen {

// Automatic intrinsic metrics over a batch of counterfactual records.
struct IntrinsicReport {
  double flip_rate = 0.0;    // [0, 1], higher better
  double fluency_ppl = 0.0;  // >= 1, lower better
  double similarity = 0.0;   // [0, 1], higher better
  double diversity = 0.0;    // >= 1, higher better
  double multi_hop = 0.0;    // [0, 1]
  std::size_t n_records = 0;
};

// Sentence BLEU up to 4-grams, add-one smoothing on every n-gram precision,
// multiplicative brevity penalty. Always in (0, 1]; 1 iff candidate equals
// reference token-for-token.
double bleu(const std::string& candidate, const std::string& reference);

// Fraction of records whose verifier prediction matches the stored label.
double flip_rate(const std::vector<CounterfactualRecord>& records,
                 const Verifier& verifier);

// Mean over claims of exp(-log_prob / token_count).
double fluency_ppl(const std::vector<std::string>& claims,
                   const TokenScorer& scorer);

// Mean semantic fidelity over (generated, original) claim pairs.
double similarity(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const EmbeddingProvider& embedder);

// Mean inverse BLEU over (generated, original) claim pairs.
double diversity(const std::vector<std::pair<std::string, std::string>>& pairs);

// Mean over records of the mean semantic fidelity between the claim and
// each evidence sentence.
double multi_hop(const std::vector<CounterfactualRecord>& records,
                 const EmbeddingProvider& embedder);

nlohmann::ordered_json report_to_json(const IntrinsicReport& report);

// Aligned plain-text table: Flip. / Flu. / Sim. / Div. / M.h. columns.
std::string report_table(const IntrinsicReport& report);

}  // namespace cfgen

#endif  // CFGEN_EVALUATOR_HPP
