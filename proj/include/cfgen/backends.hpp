#ifndef CFGEN_BACKENDS_HPP
#define CFGEN_BACKENDS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cfgen/core.hpp"

namespace cfgen {

using TokenId = std::uint32_t;

// Finite ordered token inventory with reserved begin/end markers at ids 0/1.
// Tokenization is the toy whitespace+punctuation split; real tokenizers live
// behind the remote service.
class Vocabulary {
 public:
  Vocabulary() = default;
  // `word_tokens` must not contain the marker strings; duplicates are merged.
  explicit Vocabulary(const std::vector<std::string>& word_tokens);

  static Vocabulary from_texts(const std::vector<std::string>& texts);

  static constexpr TokenId kBegin = 0;
  static constexpr TokenId kEnd = 1;

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  bool contains(const std::string& token) const {
    return index_.count(token) > 0;
  }

  // Throws UnknownTokenError for out-of-vocabulary surface tokens.
  TokenId id(const std::string& token) const;
  std::vector<TokenId> tokenize(const std::string& text) const;

  // Joins with single spaces; begin/end markers are dropped.
  std::string detokenize(const std::vector<TokenId>& ids) const;

  bool operator==(const Vocabulary&) const = default;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// Verifier output: winning label plus a full per-label score mapping that
// sums to 1.
struct VerifyResult {
  Label label = Label::NEI;
  std::map<Label, double> scores;
};

class TokenScorer {
 public:
  virtual ~TokenScorer() = default;
  virtual const Vocabulary& vocab() const = 0;
  // Log probabilities over the full vocabulary for the next token given the
  // conditioning context and the generated prefix. Entries may be -inf, but
  // the mapping always covers every token id and sums to 1 in probability
  // space. Deterministic for fixed inputs.
  virtual std::vector<double> score_next_tokens(
      const std::vector<TokenId>& context,
      const std::vector<TokenId>& prefix) const = 0;
  // Whether concurrent invocation is safe; the pipeline serializes calls to
  // backends that answer false.
  virtual bool concurrent_safe() const { return true; }
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  // One vector per token of `text`, each of size dimension(), finite entries.
  virtual std::vector<std::vector<double>> embed(
      const std::string& text) const = 0;
  virtual bool concurrent_safe() const { return true; }
};

class EntityRecognizer {
 public:
  virtual ~EntityRecognizer() = default;
  // Entities with spans into `text`; only the five retained types.
  // evidence_index is left 0 and is assigned by callers.
  virtual std::vector<Entity> recognize(const std::string& text) const = 0;
  virtual bool concurrent_safe() const { return true; }
};

class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual VerifyResult verify(const std::string& claim,
                              const Evidence& evidence) const = 0;
  virtual bool concurrent_safe() const { return true; }
};

// Validates ids against the scorer vocabulary before delegating.
std::vector<double> score_next_tokens(const TokenScorer& scorer,
                                      const std::vector<TokenId>& context,
                                      const std::vector<TokenId>& prefix);

// Chain-rule log probability of `tokens` under the scorer: the sum over
// positions of score_next_tokens at each prefix, evaluated at the realized
// token. `tokens` must be non-empty.
double sequence_log_prob(const TokenScorer& scorer,
                         const std::vector<TokenId>& context,
                         const std::vector<TokenId>& tokens);

// Argmax with ties broken towards the lowest enum order (SUP < REF < NEI).
Label argmax_label(const std::map<Label, double>& scores);

}  // namespace cfgen

#endif  // CFGEN_BACKENDS_HPP
