#ifndef CFGEN_PIPELINE_HPP
#define CFGEN_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfgen/backends.hpp"
#include "cfgen/core.hpp"
#include "cfgen/generator.hpp"

namespace cfgen {

struct BackendSet {
  std::shared_ptr<const TokenScorer> scorer;
  std::shared_ptr<const EmbeddingProvider> embedder;
  std::shared_ptr<const EntityRecognizer> recognizer;
  std::shared_ptr<const Verifier> verifier;
};

struct PipelineConfig {
  std::uint64_t seed = 42;
  GeneratorConfig generator;
  std::string backend = "toy";  // "toy" or "remote:<url>"
  std::string input_path;
  std::string output_path;
  std::string report_path;
  std::string rationales_path;  // optional gold-rationale sidecar
  bool emit_evidence_cf = false;
  std::size_t jobs = 1;
};

// JSON file mirroring PipelineConfig; unknown keys rejected.
PipelineConfig load_config(const std::string& path);
nlohmann::ordered_json config_to_json(const PipelineConfig& cfg);

struct RunReport {
  std::size_t instances_in = 0;
  std::size_t instances_emitted = 0;
  std::map<std::string, std::size_t> discards;  // reason -> count
  std::map<std::string, std::size_t> records_by_kind;
  std::map<std::string, std::size_t> records_by_label;
  std::map<std::string, double> stage_seconds;

  std::size_t discarded_total() const;
  // instances_in == instances_emitted + discarded_total()
  bool conserved() const;
  nlohmann::ordered_json to_json() const;
};

struct PipelineResult {
  std::vector<CounterfactualRecord> records;
  RunReport report;
};

// Full counterfactual flow. SUP instances: rationales -> causal entities ->
// seeded edit -> ad-check -> optional (c, E', REF) record -> constrained
// generation from the edited rationale sentences -> post-check against the
// original evidence -> fidelity filtering -> (c', E, y') record. REF
// instances skip editing and generate directly from the original evidence.
// Instances failing a stage are dropped with a reason; per-instance backend
// and validation errors never abort the run. Records are ordered by source
// id with evidence counterfactuals first.
PipelineResult run_pipeline(const std::vector<Instance>& dataset,
                            const PipelineConfig& cfg,
                            const BackendSet& backends);

// Dataset JSONL: {"id", "claim", "label", "evidence": [[title, text], ...]}.
std::vector<Instance> load_dataset(const std::string& path);
void save_dataset(const std::vector<Instance>& dataset,
                  const std::string& path);

// Output JSONL: {"source_id", "kind", "claim", "evidence", "label",
// "provenance"}, stable field order.
std::vector<CounterfactualRecord> load_records(const std::string& path);
void save_records(const std::vector<CounterfactualRecord>& records,
                  const std::string& path);

// Gold-rationale sidecar: {"id", "sentence_mask": [bool],
// "token_spans": [[[start, end], ...], ...]}.
void attach_gold_rationales(std::vector<Instance>& dataset,
                            const std::string& path);
void save_rationales(const std::vector<std::pair<std::string, Rationales>>& rows,
                     const std::string& path);

nlohmann::ordered_json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json record_to_json(const CounterfactualRecord& record);
CounterfactualRecord record_from_json(const nlohmann::ordered_json& j);

// "toy" builds corpus-trained deterministic backends; "remote:<url>" builds
// HTTP clients sharing the corpus-built vocabulary.
BackendSet make_backends(const std::string& selector,
                         const std::vector<Instance>& dataset);

}  // namespace cfgen

#endif  // CFGEN_PIPELINE_HPP
