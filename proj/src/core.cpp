#include "cfgen/core.hpp"

#include <algorithm>

#include "cfgen/errors.hpp"

namespace cfgen {

const char* label_name(Label y) {
  switch (y) {
    case Label::SUP:
      return "SUP";
    case Label::REF:
      return "REF";
    case Label::NEI:
      return "NEI";
  }
  return "?";
}

std::optional<Label> parse_label(const std::string& name) {
  if (name == "SUP") return Label::SUP;
  if (name == "REF") return Label::REF;
  if (name == "NEI") return Label::NEI;
  return std::nullopt;
}

const char* entity_type_name(EntityType t) {
  switch (t) {
    case EntityType::ORG:
      return "ORG";
    case EntityType::PERSON:
      return "PERSON";
    case EntityType::DATE:
      return "DATE";
    case EntityType::GPE:
      return "GPE";
    case EntityType::NUM:
      return "NUM";
  }
  return "?";
}

std::optional<EntityType> parse_entity_type(const std::string& name) {
  if (name == "ORG") return EntityType::ORG;
  if (name == "PERSON") return EntityType::PERSON;
  if (name == "DATE") return EntityType::DATE;
  if (name == "GPE") return EntityType::GPE;
  if (name == "NUM") return EntityType::NUM;
  return std::nullopt;
}

const char* record_kind_name(RecordKind k) {
  return k == RecordKind::CLAIM_CF ? "CLAIM_CF" : "EVIDENCE_CF";
}

std::optional<RecordKind> parse_record_kind(const std::string& name) {
  if (name == "CLAIM_CF") return RecordKind::CLAIM_CF;
  if (name == "EVIDENCE_CF") return RecordKind::EVIDENCE_CF;
  return std::nullopt;
}

bool operator==(const CounterfactualRecord& a, const CounterfactualRecord& b) {
  return a.source_id == b.source_id && a.kind == b.kind && a.claim == b.claim &&
         a.evidence == b.evidence && a.label == b.label &&
         a.provenance == b.provenance;
}

EntitySet make_entity_set(std::vector<Entity> entities,
                          const Evidence& evidence) {
  std::sort(entities.begin(), entities.end(),
            [](const Entity& a, const Entity& b) {
              if (a.evidence_index != b.evidence_index)
                return a.evidence_index < b.evidence_index;
              return a.span.start < b.span.start;
            });
  for (std::size_t i = 0; i < entities.size(); ++i) {
    const Entity& e = entities[i];
    if (e.evidence_index >= evidence.size())
      throw ValidationError("entity evidence_index out of range");
    const std::string& text = evidence[e.evidence_index].text;
    if (e.span.end > text.size() || e.span.start >= e.span.end)
      throw ValidationError("entity span out of bounds");
    if (text.compare(e.span.start, e.span.end - e.span.start, e.surface) != 0)
      throw ValidationError("entity surface does not match text at span");
    if (i > 0 && entities[i - 1].evidence_index == e.evidence_index &&
        entities[i - 1].span == e.span)
      throw ValidationError("duplicate entity position");
  }
  return EntitySet{std::move(entities)};
}

void validate_rationales(const Instance& inst, const Rationales& rats) {
  if (rats.sentence_mask.size() != inst.evidence.size())
    throw ValidationError("sentence_mask length != evidence count");
  if (rats.token_spans.size() != inst.evidence.size())
    throw ValidationError("token_spans length != evidence count");
  for (std::size_t i = 0; i < inst.evidence.size(); ++i) {
    const auto& spans = rats.token_spans[i];
    const std::size_t text_size = inst.evidence[i].text.size();
    for (std::size_t k = 0; k < spans.size(); ++k) {
      if (spans[k].start >= spans[k].end || spans[k].end > text_size)
        throw ValidationError("token span out of bounds");
      if (k > 0 && spans[k].start < spans[k - 1].end)
        throw ValidationError("token spans overlap or are unsorted");
    }
    if (!spans.empty() && !rats.sentence_mask[i])
      throw ValidationError("token span on unmasked sentence");
  }
}

const Instance& validate_instance(const Instance& inst) {
  if (inst.claim.empty()) throw ValidationError("empty claim");
  if (inst.evidence.empty()) throw ValidationError("empty evidence");
  for (const auto& e : inst.evidence) {
    if (e.text.empty()) throw ValidationError("empty evidence text");
  }
  if (inst.gold_rationales) validate_rationales(inst, *inst.gold_rationales);
  return inst;
}

}  // namespace cfgen
