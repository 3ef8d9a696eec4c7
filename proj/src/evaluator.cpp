#include "cfgen/evaluator.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "cfgen/errors.hpp"
#include "cfgen/filtering.hpp"
#include "cfgen/tokenizer.hpp"

namespace cfgen {

double bleu(const std::string& candidate, const std::string& reference) {
  const std::vector<std::string> cand = tokenize_words(candidate);
  const std::vector<std::string> ref = tokenize_words(reference);
  if (cand.empty() || ref.empty())
    throw EmptyInputError("bleu: text has no tokens");

  double log_precision = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<std::vector<std::string>, std::size_t> ref_grams;
    if (ref.size() >= n) {
      for (std::size_t i = 0; i + n <= ref.size(); ++i) {
        ++ref_grams[std::vector<std::string>(ref.begin() + i,
                                             ref.begin() + i + n)];
      }
    }
    std::map<std::vector<std::string>, std::size_t> cand_grams;
    std::size_t total = 0;
    if (cand.size() >= n) {
      for (std::size_t i = 0; i + n <= cand.size(); ++i) {
        ++cand_grams[std::vector<std::string>(cand.begin() + i,
                                              cand.begin() + i + n)];
        ++total;
      }
    }
    std::size_t matched = 0;
    for (const auto& [gram, count] : cand_grams) {
      auto it = ref_grams.find(gram);
      if (it != ref_grams.end()) matched += std::min(count, it->second);
    }
    log_precision +=
        0.25 * std::log(static_cast<double>(matched + 1) /
                        static_cast<double>(total + 1));
  }

  double brevity = 1.0;
  if (cand.size() < ref.size()) {
    brevity = std::exp(1.0 - static_cast<double>(ref.size()) /
                                 static_cast<double>(cand.size()));
  }
  return brevity * std::exp(log_precision);
}

double flip_rate(const std::vector<CounterfactualRecord>& records,
                 const Verifier& verifier) {
  if (records.empty()) throw EmptyInputError("flip_rate: no records");
  std::size_t agree = 0;
  for (const auto& r : records) {
    if (verifier.verify(r.claim, r.evidence).label == r.label) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(records.size());
}

double fluency_ppl(const std::vector<std::string>& claims,
                   const TokenScorer& scorer) {
  if (claims.empty()) throw EmptyInputError("fluency_ppl: no claims");
  double total = 0.0;
  for (const auto& claim : claims) {
    const std::vector<TokenId> tokens = scorer.vocab().tokenize(claim);
    if (tokens.empty()) throw EmptyInputError("fluency_ppl: empty claim");
    const double lp = sequence_log_prob(scorer, {}, tokens);
    total += std::exp(-lp / static_cast<double>(tokens.size()));
  }
  return total / static_cast<double>(claims.size());
}

double similarity(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const EmbeddingProvider& embedder) {
  if (pairs.empty()) throw EmptyInputError("similarity: no pairs");
  double total = 0.0;
  for (const auto& [generated, original] : pairs)
    total += semantic_fidelity(generated, original, embedder);
  return total / static_cast<double>(pairs.size());
}

double diversity(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  if (pairs.empty()) throw EmptyInputError("diversity: no pairs");
  double total = 0.0;
  for (const auto& [generated, original] : pairs)
    total += 1.0 / bleu(generated, original);
  return total / static_cast<double>(pairs.size());
}

double multi_hop(const std::vector<CounterfactualRecord>& records,
                 const EmbeddingProvider& embedder) {
  if (records.empty()) throw EmptyInputError("multi_hop: no records");
  double total = 0.0;
  for (const auto& r : records) {
    double inner = 0.0;
    for (const auto& item : r.evidence)
      inner += semantic_fidelity(r.claim, item.text, embedder);
    total += inner / static_cast<double>(r.evidence.size());
  }
  return total / static_cast<double>(records.size());
}

nlohmann::ordered_json report_to_json(const IntrinsicReport& report) {
  nlohmann::ordered_json j;
  j["flip_rate"] = report.flip_rate;
  j["fluency_ppl"] = report.fluency_ppl;
  j["similarity"] = report.similarity;
  j["diversity"] = report.diversity;
  j["multi_hop"] = report.multi_hop;
  j["n_records"] = report.n_records;
  return j;
}

std::string report_table(const IntrinsicReport& report) {
  char buffer[256];
  std::string out;
  std::snprintf(buffer, sizeof(buffer), "%10s %10s %10s %10s %10s %10s\n",
                "Flip.", "Flu.", "Sim.", "Div.", "M.h.", "N");
  out += buffer;
  std::snprintf(buffer, sizeof(buffer), "%10.4f %10.2f %10.4f %10.2f %10.4f %10zu\n",
                report.flip_rate, report.fluency_ppl, report.similarity,
                report.diversity, report.multi_hop, report.n_records);
  out += buffer;
  return out;
}

}  // namespace cfgen
