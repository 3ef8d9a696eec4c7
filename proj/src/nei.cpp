#include "cfgen/nei.hpp"

#include <algorithm>

#include "cfgen/errors.hpp"

namespace cfgen {

namespace {

// Fisher-Yates shuffle, then take the first half (rounded down).
std::vector<std::size_t> select_half(std::vector<std::size_t> indices,
                                     CounterRng& rng) {
  for (std::size_t i = indices.size(); i-- > 1;) {
    std::swap(indices[i], indices[rng.uniform(i + 1)]);
  }
  indices.resize(indices.size() / 2);
  std::sort(indices.begin(), indices.end());
  return indices;
}

}  // namespace

std::vector<Instance> augment_nei(const std::vector<Instance>& dataset,
                                  CounterRng& rng) {
  std::vector<std::size_t> sup, ref;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Instance& inst = dataset[i];
    if (inst.label == Label::NEI)
      throw ValidationError("augment_nei: NEI instance in input: " + inst.id);
    if (inst.evidence.size() < 2)
      throw ValidationError("augment_nei: instance needs >= 2 evidence: " +
                            inst.id);
    (inst.label == Label::SUP ? sup : ref).push_back(i);
  }
  if (sup.size() < 2 || ref.size() < 2)
    throw InsufficientDataError("augment_nei: each class needs >= 2 instances");

  std::vector<std::size_t> selected = select_half(sup, rng);
  {
    std::vector<std::size_t> selected_ref = select_half(ref, rng);
    selected.insert(selected.end(), selected_ref.begin(), selected_ref.end());
  }
  std::sort(selected.begin(), selected.end());

  std::vector<bool> is_selected(dataset.size(), false);
  for (std::size_t i : selected) is_selected[i] = true;

  std::vector<Instance> nei;
  for (std::size_t i : selected) {
    Instance perturbed = dataset[i];
    perturbed.id += "-nei";
    perturbed.label = Label::NEI;
    perturbed.gold_rationales.reset();
    if (rng.uniform(2) == 0) {
      // drop one evidence item
      const std::size_t drop = rng.uniform(perturbed.evidence.size());
      perturbed.evidence.erase(perturbed.evidence.begin() +
                               static_cast<std::ptrdiff_t>(drop));
    } else {
      // borrow the full evidence of a different instance
      std::size_t donor = rng.uniform(dataset.size() - 1);
      if (donor >= i) ++donor;
      perturbed.evidence = dataset[donor].evidence;
    }
    nei.push_back(std::move(perturbed));
  }

  std::vector<Instance> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!is_selected[i]) out.push_back(dataset[i]);
  }
  out.insert(out.end(), nei.begin(), nei.end());
  return out;
}

}  // namespace cfgen
