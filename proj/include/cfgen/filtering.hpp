#ifndef CFGEN_FILTERING_HPP
#define CFGEN_FILTERING_HPP

#include <string>
#include <vector>

#include "cfgen/backends.hpp"
#include "cfgen/core.hpp"

namespace cfgen {

struct FidelityScores {
  double semantic = 0.0;  // in [0, 1]
  double entity = 0.0;    // in [0, 1]
  double total = 0.0;     // semantic + entity exactly
};

FidelityScores make_fidelity(double semantic, double entity);

// 1 - EMD between the two texts' token-embedding distributions, uniform
// token weights, cost (1 - cosine)/2. Symmetric, 1 on identical inputs.
double semantic_fidelity(const std::string& candidate,
                         const std::string& original,
                         const EmbeddingProvider& embedder);

// Jaccard overlap of case-folded recognized entity surfaces; 1 when both
// texts are entity-free, 0 when exactly one is.
double entity_fidelity(const std::string& candidate,
                       const std::string& original,
                       const EntityRecognizer& ner);

struct ScoredCandidate {
  std::string claim;
  Label predicted = Label::REF;  // y'
  FidelityScores scores;
};

// Index of the sum-score argmax; ties broken by higher semantic score, then
// lexicographically smallest claim text. Throws EmptyCandidatesError on an
// empty input.
std::size_t select_best(const std::vector<ScoredCandidate>& candidates);

}  // namespace cfgen

#endif  // CFGEN_FILTERING_HPP
