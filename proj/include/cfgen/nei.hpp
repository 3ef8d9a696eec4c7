#ifndef CFGEN_NEI_HPP
#define CFGEN_NEI_HPP

#include <vector>

#include "cfgen/core.hpp"
#include "cfgen/rng.hpp"

namespace cfgen {

// Turns half of the SUP and half of the REF instances (floor on odd counts)
// into NEI instances by either dropping one evidence item or replacing the
// evidence with that of a different instance, each strategy with equal
// probability. Unselected instances pass through unchanged; output is the
// surviving originals in input order followed by the NEI instances in input
// order. The dataset must hold only SUP/REF instances with at least two
// evidence items; each class needs at least two members.
std::vector<Instance> augment_nei(const std::vector<Instance>& dataset,
                                  CounterRng& rng);

}  // namespace cfgen

#endif  // CFGEN_NEI_HPP
