#include "cfgen/filtering.hpp"

#include <algorithm>
#include <set>

#include "cfgen/emd.hpp"
#include "cfgen/errors.hpp"
#include "cfgen/tokenizer.hpp"

namespace cfgen {

FidelityScores make_fidelity(double semantic, double entity) {
  return FidelityScores{semantic, entity, semantic + entity};
}

double semantic_fidelity(const std::string& candidate,
                         const std::string& original,
                         const EmbeddingProvider& embedder) {
  if (candidate.empty() || original.empty())
    throw EmptyInputError("semantic_fidelity: empty text");
  const auto a = embedder.embed(candidate);
  const auto b = embedder.embed(original);
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;

  std::vector<std::vector<double>> cost(a.size(),
                                        std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j)
      cost[i][j] = cosine_cost(a[i], b[j]);
  }
  const std::vector<double> supply(a.size(), 1.0 / a.size());
  const std::vector<double> demand(b.size(), 1.0 / b.size());
  const double emd = solve_transport(cost, supply, demand);
  return std::clamp(1.0 - emd, 0.0, 1.0);
}

double entity_fidelity(const std::string& candidate,
                       const std::string& original,
                       const EntityRecognizer& ner) {
  if (candidate.empty() || original.empty())
    throw EmptyInputError("entity_fidelity: empty text");
  auto surfaces = [&ner](const std::string& text) {
    std::set<std::string> out;
    for (const Entity& e : ner.recognize(text)) out.insert(to_lower(e.surface));
    return out;
  };
  const std::set<std::string> a = surfaces(candidate);
  const std::set<std::string> b = surfaces(original);
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::size_t intersection = 0;
  for (const auto& s : a) intersection += b.count(s);
  const std::size_t unioned = a.size() + b.size() - intersection;
  return static_cast<double>(intersection) / static_cast<double>(unioned);
}

std::size_t select_best(const std::vector<ScoredCandidate>& candidates) {
  if (candidates.empty())
    throw EmptyCandidatesError("select_best: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const ScoredCandidate& c = candidates[i];
    const ScoredCandidate& b = candidates[best];
    if (c.scores.total > b.scores.total ||
        (c.scores.total == b.scores.total &&
         (c.scores.semantic > b.scores.semantic ||
          (c.scores.semantic == b.scores.semantic && c.claim < b.claim)))) {
      best = i;
    }
  }
  return best;
}

}  // namespace cfgen
