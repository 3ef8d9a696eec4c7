#ifndef CFGEN_EDITOR_HPP
#define CFGEN_EDITOR_HPP

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cfgen/backends.hpp"
#include "cfgen/core.hpp"
#include "cfgen/rng.hpp"

namespace cfgen {

// Replacement surfaces per type, harvested once from the whole dataset.
// Entries deduplicated and sorted for determinism.
struct EntityPools {
  std::vector<std::string> gpe;
  std::vector<std::string> date;
  std::vector<std::string> num;

  const std::vector<std::string>& pool(EntityType t) const;
};

struct ReplaceOp {
  EntityType etype = EntityType::GPE;
  std::string old_surface;
  std::string new_surface;
  bool operator==(const ReplaceOp&) const = default;
};

struct SwapOp {
  std::string surface_a;
  std::string surface_b;
  bool operator==(const SwapOp&) const = default;
};

using EditOp = std::variant<ReplaceOp, SwapOp>;

struct EditPlan {
  std::vector<EditOp> ops;
  bool empty() const { return ops.empty(); }
};

std::string describe(const EditOp& op);

// Entities whose span overlaps a token-rationale span; only the five
// retained types are emitted by the recognizer. May be empty.
EntitySet collect_causal_entities(const Instance& inst, const Rationales& rats,
                                  const EntityRecognizer& ner);

// Every GPE/DATE/NUM surface recognized anywhere in any evidence text.
EntityPools build_entity_pools(const std::vector<Instance>& dataset,
                               const EntityRecognizer& ner);

// One Replace per distinct GPE/DATE/NUM surface (uniform pool draw) and one
// Swap over an rng-chosen PERSON/ORG pair located in different evidence
// items when two or more distinct surfaces exist. Throws NoEditPossibleError
// when no rule applies.
EditPlan plan_edits(const EntitySet& causal, const EntityPools& pools,
                    CounterRng& rng);

struct EditResult {
  Evidence evidence;  // E'
  EntitySet entities; // T'
};

// Rewrites every occurrence of each edited surface in every evidence text
// and title. Replace maps old to new everywhere; Swap exchanges both
// surfaces simultaneously. Longest surfaces win when matches overlap.
// Non-entity text is byte-identical outside replaced regions.
EditResult apply_edits(const Evidence& evidence, const EntitySet& causal,
                       const EditPlan& plan);

}  // namespace cfgen

#endif  // CFGEN_EDITOR_HPP
