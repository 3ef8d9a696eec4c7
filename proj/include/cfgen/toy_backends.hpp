#ifndef CFGEN_TOY_BACKENDS_HPP
#define CFGEN_TOY_BACKENDS_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cfgen/backends.hpp"

namespace cfgen {

// log(1/|V|) for every token, any prefix.
class UniformScorer : public TokenScorer {
 public:
  explicit UniformScorer(Vocabulary vocab) : vocab_(std::move(vocab)) {}
  const Vocabulary& vocab() const override { return vocab_; }
  std::vector<double> score_next_tokens(
      const std::vector<TokenId>& context,
      const std::vector<TokenId>& prefix) const override;

 private:
  Vocabulary vocab_;
};

// Bigram language model counted over training texts, each padded with the
// begin/end markers. alpha = 0 gives maximum-likelihood rows (zeros allowed,
// unseen conditioning rows fall back to uniform); alpha > 0 add-alpha
// smoothing. context_boost > 1 multiplies the weight of tokens present in
// the conditioning context before renormalizing, which pulls generation
// towards the input text.
class BigramScorer : public TokenScorer {
 public:
  BigramScorer(Vocabulary vocab, const std::vector<std::string>& texts,
               double alpha = 0.0, double context_boost = 1.0);
  const Vocabulary& vocab() const override { return vocab_; }
  std::vector<double> score_next_tokens(
      const std::vector<TokenId>& context,
      const std::vector<TokenId>& prefix) const override;

 private:
  Vocabulary vocab_;
  double alpha_;
  double context_boost_;
  std::vector<std::vector<std::uint32_t>> counts_;  // [prev][next]
  std::vector<std::uint64_t> totals_;               // [prev]
};

// Seeded scorer whose next-token distribution is a pure function of
// (seed, context, last prefix token). Full support, deterministic across
// platforms; used by randomized search tests.
class RandomScorer : public TokenScorer {
 public:
  RandomScorer(Vocabulary vocab, std::uint64_t seed)
      : vocab_(std::move(vocab)), seed_(seed) {}
  const Vocabulary& vocab() const override { return vocab_; }
  std::vector<double> score_next_tokens(
      const std::vector<TokenId>& context,
      const std::vector<TokenId>& prefix) const override;

 private:
  Vocabulary vocab_;
  std::uint64_t seed_;
};

// Deterministic per-token embeddings: each component is a seeded hash of the
// token surface mapped into [-1, 1].
class HashEmbedder : public EmbeddingProvider {
 public:
  HashEmbedder(std::size_t dimension, std::uint64_t seed)
      : dimension_(dimension), seed_(seed) {}
  std::size_t dimension() const override { return dimension_; }
  std::vector<std::vector<double>> embed(
      const std::string& text) const override;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

// Explicit token -> vector table, for hand-computed oracle tests.
class FixedEmbedder : public EmbeddingProvider {
 public:
  FixedEmbedder(std::size_t dimension,
                std::map<std::string, std::vector<double>> table)
      : dimension_(dimension), table_(std::move(table)) {}
  std::size_t dimension() const override { return dimension_; }
  std::vector<std::vector<double>> embed(
      const std::string& text) const override;

 private:
  std::size_t dimension_;
  std::map<std::string, std::vector<double>> table_;
};

// Name lists for the gazetteer recognizer. Multi-word phrases allowed;
// matching is case-sensitive, longest-first, left-to-right.
struct Gazetteer {
  std::vector<std::string> persons;
  std::vector<std::string> orgs;
  std::vector<std::string> gpes;
};

// Names used by the bundled toy corpus.
Gazetteer default_gazetteer();

// Gazetteer lookup for PERSON/ORG/GPE plus digit patterns: four-digit
// tokens are DATE, other all-digit tokens are NUM.
class GazetteerRecognizer : public EntityRecognizer {
 public:
  explicit GazetteerRecognizer(Gazetteer gazetteer);
  std::vector<Entity> recognize(const std::string& text) const override;

 private:
  struct PhraseEntry {
    std::vector<std::string> tokens;
    EntityType etype;
  };
  // keyed by first token, longest phrase first
  std::map<std::string, std::vector<PhraseEntry>> phrases_;
};

// Entity-presence rule verifier: with f the fraction of distinct claim
// entities found verbatim in any evidence title or text (f = 1 when the
// claim has no entities), the label is SUP when f = 1, REF when f >= 1/2,
// NEI otherwise. The winning label scores 0.6, the others 0.2.
class EntityOverlapVerifier : public Verifier {
 public:
  explicit EntityOverlapVerifier(std::shared_ptr<const EntityRecognizer> ner)
      : ner_(std::move(ner)) {}
  VerifyResult verify(const std::string& claim,
                      const Evidence& evidence) const override;

 private:
  std::shared_ptr<const EntityRecognizer> ner_;
};

}  // namespace cfgen

#endif  // CFGEN_TOY_BACKENDS_HPP
