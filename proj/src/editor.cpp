#include "cfgen/editor.hpp"

#include <algorithm>
#include <set>

#include "cfgen/errors.hpp"

namespace cfgen {

const std::vector<std::string>& EntityPools::pool(EntityType t) const {
  switch (t) {
    case EntityType::GPE:
      return gpe;
    case EntityType::DATE:
      return date;
    case EntityType::NUM:
      return num;
    default:
      throw Error("no pool for entity type " +
                  std::string(entity_type_name(t)));
  }
}

std::string describe(const EditOp& op) {
  if (const auto* rep = std::get_if<ReplaceOp>(&op)) {
    return std::string(entity_type_name(rep->etype)) + ":" + rep->old_surface +
           "->" + rep->new_surface;
  }
  const auto& swap = std::get<SwapOp>(op);
  return "SWAP:" + swap.surface_a + "<->" + swap.surface_b;
}

EntitySet collect_causal_entities(const Instance& inst, const Rationales& rats,
                                  const EntityRecognizer& ner) {
  validate_rationales(inst, rats);
  std::vector<Entity> kept;
  for (std::size_t i = 0; i < inst.evidence.size(); ++i) {
    if (rats.token_spans[i].empty()) continue;
    for (Entity e : ner.recognize(inst.evidence[i].text)) {
      bool overlaps = false;
      for (const Span& r : rats.token_spans[i]) {
        if (e.span.start < r.end && r.start < e.span.end) {
          overlaps = true;
          break;
        }
      }
      if (!overlaps) continue;
      e.evidence_index = i;
      kept.push_back(std::move(e));
    }
  }
  return make_entity_set(std::move(kept), inst.evidence);
}

EntityPools build_entity_pools(const std::vector<Instance>& dataset,
                               const EntityRecognizer& ner) {
  if (dataset.empty()) throw EmptyInputError("build_entity_pools: no dataset");
  std::set<std::string> gpe, date, num;
  for (const Instance& inst : dataset) {
    for (const auto& item : inst.evidence) {
      for (const Entity& e : ner.recognize(item.text)) {
        switch (e.etype) {
          case EntityType::GPE:
            gpe.insert(e.surface);
            break;
          case EntityType::DATE:
            date.insert(e.surface);
            break;
          case EntityType::NUM:
            num.insert(e.surface);
            break;
          default:
            break;  // PERSON/ORG are instance-local, never pooled
        }
      }
    }
  }
  EntityPools pools;
  pools.gpe.assign(gpe.begin(), gpe.end());
  pools.date.assign(date.begin(), date.end());
  pools.num.assign(num.begin(), num.end());
  return pools;
}

namespace {

bool contains_any(const std::string& s, const std::set<std::string>& needles) {
  for (const auto& n : needles) {
    if (s.find(n) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

EditPlan plan_edits(const EntitySet& causal, const EntityPools& pools,
                    CounterRng& rng) {
  if (causal.empty())
    throw NoEditPossibleError("no causal entities to edit");

  // Distinct surfaces per rule, in deterministic order.
  std::set<std::string> replace_targets;
  std::map<EntityType, std::set<std::string>> by_type;
  std::map<std::string, std::set<std::size_t>> swap_locations;
  for (const Entity& e : causal.entities) {
    if (e.etype == EntityType::GPE || e.etype == EntityType::DATE ||
        e.etype == EntityType::NUM) {
      by_type[e.etype].insert(e.surface);
      replace_targets.insert(e.surface);
    } else {
      swap_locations[e.surface].insert(e.evidence_index);
    }
  }

  // A draw must not reintroduce a surface some other op removes, so pool
  // entries containing any edited surface are ineligible.
  std::set<std::string> protected_surfaces = replace_targets;
  for (const auto& [surface, locs] : swap_locations)
    protected_surfaces.insert(surface);

  EditPlan plan;
  for (EntityType etype :
       {EntityType::GPE, EntityType::DATE, EntityType::NUM}) {
    auto it = by_type.find(etype);
    if (it == by_type.end()) continue;
    for (const std::string& old_surface : it->second) {
      std::vector<std::string> candidates;
      for (const std::string& entry : pools.pool(etype)) {
        if (entry == old_surface) continue;
        if (contains_any(entry, protected_surfaces)) continue;
        candidates.push_back(entry);
      }
      if (candidates.empty()) continue;  // pool too small for this surface
      const std::string& pick = candidates[rng.uniform(candidates.size())];
      plan.ops.push_back(ReplaceOp{etype, old_surface, pick});
    }
  }

  // in-Instance swap: an rng-chosen PERSON/ORG pair in different evidence.
  if (swap_locations.size() >= 2) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (auto a = swap_locations.begin(); a != swap_locations.end(); ++a) {
      for (auto b = std::next(a); b != swap_locations.end(); ++b) {
        bool cross_evidence = false;
        for (std::size_t ia : a->second) {
          for (std::size_t ib : b->second) {
            if (ia != ib) {
              cross_evidence = true;
              break;
            }
          }
          if (cross_evidence) break;
        }
        if (!cross_evidence) continue;
        if (a->first.find(b->first) != std::string::npos ||
            b->first.find(a->first) != std::string::npos)
          continue;
        if (contains_any(a->first, replace_targets) ||
            contains_any(b->first, replace_targets))
          continue;
        pairs.emplace_back(a->first, b->first);
      }
    }
    if (!pairs.empty()) {
      const auto& [a, b] = pairs[rng.uniform(pairs.size())];
      plan.ops.push_back(SwapOp{a, b});
    }
  }

  if (plan.empty())
    throw NoEditPossibleError(
        "no eligible entity: pools too small and no cross-evidence swap pair");
  return plan;
}

namespace {

struct Rewrite {
  std::size_t orig_start = 0;
  std::size_t orig_len = 0;
  std::size_t new_start = 0;
  std::string new_text;
};

struct RewrittenText {
  std::string text;
  std::vector<Rewrite> rewrites;
};

// Single left-to-right pass over the original string; at each position the
// longest matching old surface wins. Matches never overlap, so simultaneous
// swaps are collision-safe.
RewrittenText rewrite_text(const std::string& text,
                           const std::vector<std::pair<std::string,
                                                       std::string>>& mapping) {
  RewrittenText out;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::pair<std::string, std::string>* hit = nullptr;
    for (const auto& entry : mapping) {  // sorted longest-first
      if (text.compare(i, entry.first.size(), entry.first) == 0) {
        hit = &entry;
        break;
      }
    }
    if (hit == nullptr) {
      out.text += text[i];
      ++i;
      continue;
    }
    out.rewrites.push_back(
        Rewrite{i, hit->first.size(), out.text.size(), hit->second});
    out.text += hit->second;
    i += hit->first.size();
  }
  return out;
}

void validate_plan(const EditPlan& plan) {
  std::set<std::string> targeted;
  for (const EditOp& op : plan.ops) {
    if (const auto* rep = std::get_if<ReplaceOp>(&op)) {
      if (rep->new_surface == rep->old_surface)
        throw ValidationError("replace with identical surface");
      if (rep->old_surface.empty())
        throw ValidationError("replace of empty surface");
      if (!targeted.insert(rep->old_surface).second)
        throw ValidationError("surface targeted twice: " + rep->old_surface);
    } else {
      const auto& swap = std::get<SwapOp>(op);
      if (swap.surface_a == swap.surface_b)
        throw ValidationError("swap of identical surfaces");
      if (swap.surface_a.empty() || swap.surface_b.empty())
        throw ValidationError("swap of empty surface");
      if (!targeted.insert(swap.surface_a).second ||
          !targeted.insert(swap.surface_b).second)
        throw ValidationError("surface targeted twice in swap");
    }
  }
}

}  // namespace

EditResult apply_edits(const Evidence& evidence, const EntitySet& causal,
                       const EditPlan& plan) {
  validate_plan(plan);

  std::vector<std::pair<std::string, std::string>> mapping;
  for (const EditOp& op : plan.ops) {
    if (const auto* rep = std::get_if<ReplaceOp>(&op)) {
      mapping.emplace_back(rep->old_surface, rep->new_surface);
    } else {
      const auto& swap = std::get<SwapOp>(op);
      mapping.emplace_back(swap.surface_a, swap.surface_b);
      mapping.emplace_back(swap.surface_b, swap.surface_a);
    }
  }
  std::sort(mapping.begin(), mapping.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size())
      return a.first.size() > b.first.size();
    return a.first < b.first;
  });

  EditResult result;
  std::vector<RewrittenText> text_rewrites;
  for (const EvidenceItem& item : evidence) {
    RewrittenText rt = rewrite_text(item.text, mapping);
    RewrittenText title = rewrite_text(item.title, mapping);
    result.evidence.push_back(EvidenceItem{title.text, rt.text});
    text_rewrites.push_back(std::move(rt));
  }

  // T' mirrors T: edited entities take their rewritten surface and span;
  // untouched entities shift by the net length change before them. Entities
  // swallowed by a longer overlapping match are gone.
  std::vector<Entity> edited;
  for (const Entity& e : causal.entities) {
    const auto& rewrites = text_rewrites[e.evidence_index].rewrites;
    const Rewrite* exact = nullptr;
    bool overlapping = false;
    std::ptrdiff_t delta = 0;
    for (const Rewrite& r : rewrites) {
      if (r.orig_start == e.span.start && r.orig_len == e.span.end - e.span.start) {
        exact = &r;
        break;
      }
      if (r.orig_start < e.span.end && e.span.start < r.orig_start + r.orig_len) {
        overlapping = true;
        break;
      }
      if (r.orig_start + r.orig_len <= e.span.start) {
        delta += static_cast<std::ptrdiff_t>(r.new_text.size()) -
                 static_cast<std::ptrdiff_t>(r.orig_len);
      }
    }
    if (exact != nullptr) {
      edited.push_back(Entity{exact->new_text, e.etype, e.evidence_index,
                              Span{exact->new_start,
                                   exact->new_start + exact->new_text.size()}});
    } else if (!overlapping) {
      std::size_t start = static_cast<std::size_t>(
          static_cast<std::ptrdiff_t>(e.span.start) + delta);
      edited.push_back(Entity{e.surface, e.etype, e.evidence_index,
                              Span{start, start + e.surface.size()}});
    }
  }
  result.entities = make_entity_set(std::move(edited), result.evidence);
  return result;
}

}  // namespace cfgen
