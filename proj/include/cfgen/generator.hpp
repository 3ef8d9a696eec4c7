#ifndef CFGEN_GENERATOR_HPP
#define CFGEN_GENERATOR_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cfgen/backends.hpp"
#include "cfgen/core.hpp"

namespace cfgen {

// Entity phrases from one evidence item; any one of them must appear in the
// generated claim.
struct DisjunctiveGroup {
  std::size_t evidence_index = 0;
  std::vector<std::vector<TokenId>> phrases;  // each non-empty
};

// Conjunction over all groups: the decoding constraint.
struct ConstraintSet {
  std::vector<DisjunctiveGroup> groups;  // ordered by evidence_index
  std::size_t size() const { return groups.size(); }
};

struct Hypothesis {
  std::vector<TokenId> tokens;
  double log_prob = 0.0;
  // satisfied[g] is true iff some phrase of group g occurs as a contiguous
  // token subsequence of tokens.
  std::vector<bool> satisfied;
  struct PhraseProgress {
    std::size_t group = 0;
    std::size_t phrase = 0;
    std::size_t position = 0;  // tokens already emitted of this phrase
  };
  // Longest partial phrase match currently open at the tail, if any.
  std::optional<PhraseProgress> phrase_progress;

  std::size_t satisfied_count() const;
};

struct GeneratorConfig {
  std::size_t beam_size = 30;
  std::size_t max_length = 96;  // tokens, including the end marker
  std::size_t k = 10;
};

// One group per evidence index owning at least one entity; phrases are that
// evidence's distinct entity surfaces tokenized under the scorer vocabulary.
// Throws EmptyConstraintsError when nothing tokenizes to a non-empty phrase.
ConstraintSet build_constraints(const EntitySet& entities,
                                const TokenScorer& scorer);

// Lexically constrained beam search with bank-partitioned dynamic beam
// allocation. Hypotheses are bucketed by how many groups they satisfy; each
// of the n+1 banks owns floor(beam_size/(n+1)) slots and the remainder plus
// any unfilled slots flow to the fullest-satisfying banks. Expansion per
// hypothesis: the top-scoring ordinary tokens, forced starts of unsatisfied
// groups' phrases, and forced continuations of partially emitted phrases.
//
// Returns every finished hypothesis (ends with the end marker within
// max_length and satisfies all groups), ranked by log probability, ties by
// lexicographic token order. Throws NoSatisfyingHypothesisError when none
// finishes. An empty constraint set degenerates to plain beam search.
std::vector<Hypothesis> constrained_beam_search(const TokenScorer& scorer,
                                                const std::string& input,
                                                const ConstraintSet& cons,
                                                const GeneratorConfig& cfg);

struct GeneratedCandidates {
  std::vector<std::string> claims;  // distinct, best-first, at most k
  std::size_t shortfall = 0;        // k minus the number returned
};

// Runs the constrained search over the concatenation, in evidence order, of
// all masked sentences, then detokenizes, deduplicates and truncates to k.
GeneratedCandidates generate_candidates(const Rationales& rats,
                                        const Evidence& evidence,
                                        const EntitySet& entities,
                                        const TokenScorer& scorer,
                                        const GeneratorConfig& cfg);

// Concatenation of masked sentences, the generator input text.
std::string rationale_input_text(const Rationales& rats,
                                 const Evidence& evidence);

}  // namespace cfgen

#endif  // CFGEN_GENERATOR_HPP
