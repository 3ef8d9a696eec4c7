#include "cfgen/checking.hpp"

#include "cfgen/errors.hpp"

namespace cfgen {

AdDecision ad_check(const std::string& claim, const Evidence& edited,
                    const Verifier& verifier) {
  if (claim.empty() || edited.empty())
    throw EmptyInputError("ad_check: empty claim or evidence");
  AdDecision decision;
  decision.verdict = verifier.verify(claim, edited);
  decision.keep = decision.verdict.label == Label::REF;
  if (!decision.keep) {
    decision.discard_reason =
        decision.verdict.label == Label::SUP ? "under-edited" : "over-edited";
  }
  return decision;
}

std::vector<CheckedCandidate> post_check(
    const std::vector<std::string>& candidates, const Evidence& original,
    Label original_label, const Verifier& verifier) {
  if (original_label == Label::NEI)
    throw ValidationError("post_check: original label must be SUP or REF");
  std::vector<CheckedCandidate> retained;
  for (const std::string& candidate : candidates) {
    VerifyResult verdict = verifier.verify(candidate, original);
    if (verdict.label == original_label) continue;
    retained.push_back(CheckedCandidate{candidate, verdict.label, verdict});
  }
  return retained;
}

}  // namespace cfgen
