#ifndef CFGEN_CHECKING_HPP
#define CFGEN_CHECKING_HPP

#include <string>
#include <vector>

#include "cfgen/backends.hpp"
#include "cfgen/core.hpp"

namespace cfgen {

struct AdDecision {
  bool keep = false;
  VerifyResult verdict;  // recorded even on discard
  // "under-edited" (SUP), "over-edited" (NEI), empty on KEEP
  std::string discard_reason;
};

// Keeps an edited evidence candidate iff the verifier predicts REF for the
// original claim against it.
AdDecision ad_check(const std::string& claim, const Evidence& edited,
                    const Verifier& verifier);

struct CheckedCandidate {
  std::string claim;
  Label predicted;  // y', always != the original label
  VerifyResult verdict;
};

// Retains, in input order, the candidates whose predicted label against the
// original evidence differs from the original label.
std::vector<CheckedCandidate> post_check(
    const std::vector<std::string>& candidates, const Evidence& original,
    Label original_label, const Verifier& verifier);

}  // namespace cfgen

#endif  // CFGEN_CHECKING_HPP
