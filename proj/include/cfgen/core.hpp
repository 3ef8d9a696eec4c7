#ifndef CFGEN_CORE_HPP
#define CFGEN_CORE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cfgen {

// Verification label. Pipeline inputs are restricted to SUP/REF; NEI exists
// because the checking verifier is three-way.
enum class Label { SUP, REF, NEI };

const char* label_name(Label y);
std::optional<Label> parse_label(const std::string& name);

// Half-open character span [start, end) into some text.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct EvidenceItem {
  std::string title;  // page title, may be empty
  std::string text;   // sentence text, non-empty
  bool operator==(const EvidenceItem&) const = default;
};

using Evidence = std::vector<EvidenceItem>;

// Sentence-level mask plus per-evidence token spans marking causal content.
struct Rationales {
  std::vector<bool> sentence_mask;
  std::vector<std::vector<Span>> token_spans;
  bool operator==(const Rationales&) const = default;
};

// One claim, its multi-hop evidence sequence, and a verification label.
struct Instance {
  std::string id;
  std::string claim;
  Evidence evidence;
  Label label = Label::SUP;
  // Gold rationale annotations, attached from the optional sidecar file.
  std::optional<Rationales> gold_rationales;
  bool operator==(const Instance&) const = default;
};

enum class EntityType { ORG, PERSON, DATE, GPE, NUM };

const char* entity_type_name(EntityType t);
std::optional<EntityType> parse_entity_type(const std::string& name);

// A typed named entity located inside one evidence text.
struct Entity {
  std::string surface;
  EntityType etype = EntityType::ORG;
  std::size_t evidence_index = 0;
  Span span;
  bool operator==(const Entity&) const = default;
};

// Entities sorted by (evidence_index, span.start), unique per position.
struct EntitySet {
  std::vector<Entity> entities;
  bool empty() const { return entities.empty(); }
  std::size_t size() const { return entities.size(); }
  auto begin() const { return entities.begin(); }
  auto end() const { return entities.end(); }
  bool operator==(const EntitySet&) const = default;
};

// Sorts, checks span/surface agreement against the evidence, and rejects
// duplicate (evidence_index, span) positions.
EntitySet make_entity_set(std::vector<Entity> entities,
                          const Evidence& evidence);

enum class RecordKind { CLAIM_CF, EVIDENCE_CF };

const char* record_kind_name(RecordKind k);
std::optional<RecordKind> parse_record_kind(const std::string& name);

// Final augmented instance: a generated claim over the original evidence
// (CLAIM_CF) or the original claim over edited evidence (EVIDENCE_CF).
struct CounterfactualRecord {
  std::string source_id;
  RecordKind kind = RecordKind::CLAIM_CF;
  std::string claim;
  Evidence evidence;
  Label label = Label::REF;
  // Stage decisions: scores, verifier outputs, seed. Ordered so that
  // serialization is byte-stable.
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
};

bool operator==(const CounterfactualRecord& a, const CounterfactualRecord& b);

// Returns the instance unchanged when all invariants hold, otherwise throws
// ValidationError naming the violated invariant. Validates attached gold
// rationales when present. Idempotent.
const Instance& validate_instance(const Instance& inst);

// Rationales invariants against an instance: mask length, span bounds,
// per-evidence ordering/disjointness, and mask/span consistency.
void validate_rationales(const Instance& inst, const Rationales& rats);

}  // namespace cfgen

#endif  // CFGEN_CORE_HPP
