// cfgen: counterfactual data generation for multi-hop fact verification.
//
// Subcommands mirror the pipeline stages; `run` executes the whole flow.
// Flags override config-file values.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfgen/checking.hpp"
#include "cfgen/editor.hpp"
#include "cfgen/errors.hpp"
#include "cfgen/evaluator.hpp"
#include "cfgen/explainer.hpp"
#include "cfgen/filtering.hpp"
#include "cfgen/generator.hpp"
#include "cfgen/nei.hpp"
#include "cfgen/pipeline.hpp"
#include "cfgen/rng.hpp"

namespace {

using nlohmann::ordered_json;
using namespace cfgen;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<std::size_t> beam_size;
  std::optional<std::size_t> max_length;
  std::optional<std::string> backend;
  std::optional<std::string> input;
  std::optional<std::string> output;
  std::optional<std::string> report;
  std::optional<std::string> rationales;
  bool emit_evidence_cf = false;
  std::optional<std::size_t> jobs;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--seed", flags.seed, "global random seed");
  cmd->add_option("--k", flags.k, "candidate claims per instance");
  cmd->add_option("--beam-size", flags.beam_size, "beam width");
  cmd->add_option("--max-length", flags.max_length,
                  "max generated length in tokens");
  cmd->add_option("--backend", flags.backend, "toy | remote:<url>");
  cmd->add_option("--input,-i", flags.input, "input dataset JSONL");
  cmd->add_option("--output,-o", flags.output, "output path");
  cmd->add_option("--report", flags.report, "run/evaluation report path");
  cmd->add_option("--rationales", flags.rationales,
                  "gold-rationale sidecar JSONL");
  cmd->add_flag("--emit-evidence-cf", flags.emit_evidence_cf,
                "also emit (claim, edited evidence, REF) records");
  cmd->add_option("--jobs", flags.jobs, "worker threads");
}

PipelineConfig resolve_config(const CommonFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.k) cfg.generator.k = *flags.k;
  if (flags.beam_size) cfg.generator.beam_size = *flags.beam_size;
  if (flags.max_length) cfg.generator.max_length = *flags.max_length;
  if (flags.backend) cfg.backend = *flags.backend;
  if (flags.input) cfg.input_path = *flags.input;
  if (flags.output) cfg.output_path = *flags.output;
  if (flags.report) cfg.report_path = *flags.report;
  if (flags.rationales) cfg.rationales_path = *flags.rationales;
  if (flags.emit_evidence_cf) cfg.emit_evidence_cf = true;
  if (flags.jobs) cfg.jobs = *flags.jobs;
  if (cfg.input_path.empty())
    throw ValidationError("--input (or config \"input\") is required");
  return cfg;
}

std::vector<Instance> load_input(const PipelineConfig& cfg) {
  std::vector<Instance> dataset = load_dataset(cfg.input_path);
  if (!cfg.rationales_path.empty())
    attach_gold_rationales(dataset, cfg.rationales_path);
  return dataset;
}

std::ofstream open_output(const PipelineConfig& cfg) {
  if (cfg.output_path.empty())
    throw ValidationError("--output (or config \"output\") is required");
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + cfg.output_path);
  return out;
}

Rationales extract_for(const Instance& inst) {
  if (inst.gold_rationales) return OracleExtractor().extract(inst);
  return HeuristicExtractor().extract(inst);
}

int cmd_explain(const CommonFlags& flags) {
  PipelineConfig cfg = resolve_config(flags);
  std::vector<std::pair<std::string, Rationales>> rows;
  for (const Instance& inst : load_input(cfg)) {
    try {
      rows.emplace_back(inst.id, extract_for(inst));
    } catch (const EmptyRationaleError& e) {
      std::cerr << "skip " << inst.id << ": " << e.what() << "\n";
    }
  }
  if (cfg.output_path.empty())
    throw ValidationError("--output is required");
  save_rationales(rows, cfg.output_path);
  std::cout << "wrote rationales for " << rows.size() << " instances to "
            << cfg.output_path << "\n";
  return 0;
}

int cmd_edit(const CommonFlags& flags) {
  PipelineConfig cfg = resolve_config(flags);
  const std::vector<Instance> dataset = load_input(cfg);
  const BackendSet backends = make_backends(cfg.backend, dataset);
  const EntityPools pools = build_entity_pools(dataset, *backends.recognizer);

  std::ofstream out = open_output(cfg);
  std::size_t kept = 0;
  for (const Instance& inst : dataset) {
    if (inst.label != Label::SUP) continue;  // only SUP instances are edited
    ordered_json row;
    row["id"] = inst.id;
    try {
      const Rationales rats = extract_for(inst);
      const EntitySet causal =
          collect_causal_entities(inst, rats, *backends.recognizer);
      CounterRng rng(instance_seed(cfg.seed, inst.id));
      const EditPlan plan = plan_edits(causal, pools, rng);
      const EditResult edited = apply_edits(inst.evidence, causal, plan);
      const AdDecision decision =
          ad_check(inst.claim, edited.evidence, *backends.verifier);

      ordered_json ops = ordered_json::array();
      for (const EditOp& op : plan.ops) ops.push_back(describe(op));
      row["ops"] = ops;
      ordered_json evidence = ordered_json::array();
      for (const auto& item : edited.evidence)
        evidence.push_back(ordered_json::array({item.title, item.text}));
      row["evidence"] = evidence;
      row["kept"] = decision.keep;
      row["verifier_label"] = label_name(decision.verdict.label);
      if (decision.keep) ++kept;
    } catch (const Error& e) {
      row["error"] = e.what();
    }
    out << row.dump() << '\n';
  }
  std::cout << "edited evidence written to " << cfg.output_path << " ("
            << kept << " kept by ad-check)\n";
  return 0;
}

int cmd_generate(const CommonFlags& flags) {
  PipelineConfig cfg = resolve_config(flags);
  const std::vector<Instance> dataset = load_input(cfg);
  const BackendSet backends = make_backends(cfg.backend, dataset);
  const EntityPools pools = build_entity_pools(dataset, *backends.recognizer);

  std::ofstream out = open_output(cfg);
  for (const Instance& inst : dataset) {
    if (inst.label == Label::NEI) continue;
    ordered_json row;
    row["id"] = inst.id;
    row["label"] = label_name(inst.label);
    try {
      const Rationales rats = extract_for(inst);
      EntitySet entities =
          collect_causal_entities(inst, rats, *backends.recognizer);
      const Evidence* evidence = &inst.evidence;
      Evidence edited_storage;
      if (inst.label == Label::SUP) {
        CounterRng rng(instance_seed(cfg.seed, inst.id));
        const EditPlan plan = plan_edits(entities, pools, rng);
        EditResult edited = apply_edits(inst.evidence, entities, plan);
        const AdDecision decision =
            ad_check(inst.claim, edited.evidence, *backends.verifier);
        if (!decision.keep) {
          row["error"] = "ad-check-" + decision.discard_reason;
          out << row.dump() << '\n';
          continue;
        }
        edited_storage = std::move(edited.evidence);
        evidence = &edited_storage;
        entities = std::move(edited.entities);
      }
      const GeneratedCandidates generated = generate_candidates(
          rats, *evidence, entities, *backends.scorer, cfg.generator);
      row["candidates"] = generated.claims;
      row["shortfall"] = generated.shortfall;
    } catch (const Error& e) {
      row["error"] = e.what();
    }
    out << row.dump() << '\n';
  }
  std::cout << "candidates written to " << cfg.output_path << "\n";
  return 0;
}

int cmd_filter(const CommonFlags& flags, const std::string& candidates_path) {
  PipelineConfig cfg = resolve_config(flags);
  const std::vector<Instance> dataset = load_input(cfg);
  const BackendSet backends = make_backends(cfg.backend, dataset);

  std::map<std::string, std::vector<std::string>> candidates;
  {
    std::ifstream in(candidates_path);
    if (!in) throw IoError("cannot open candidates: " + candidates_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
      }
      if (j.contains("candidates"))
        candidates[j.at("id").get<std::string>()] =
            j.at("candidates").get<std::vector<std::string>>();
    }
  }

  std::vector<CounterfactualRecord> records;
  for (const Instance& inst : dataset) {
    auto it = candidates.find(inst.id);
    if (it == candidates.end() || inst.label == Label::NEI) continue;
    const std::vector<CheckedCandidate> checked =
        post_check(it->second, inst.evidence, inst.label, *backends.verifier);
    std::vector<ScoredCandidate> scored;
    for (const CheckedCandidate& c : checked) {
      if (c.predicted == Label::NEI) continue;
      scored.push_back(ScoredCandidate{
          c.claim, c.predicted,
          make_fidelity(semantic_fidelity(c.claim, inst.claim,
                                          *backends.embedder),
                        entity_fidelity(c.claim, inst.claim,
                                        *backends.recognizer))});
    }
    if (scored.empty()) continue;
    const std::size_t best = select_best(scored);
    CounterfactualRecord record;
    record.source_id = inst.id;
    record.kind = RecordKind::CLAIM_CF;
    record.claim = scored[best].claim;
    record.evidence = inst.evidence;
    record.label = scored[best].predicted;
    record.provenance["seed"] = instance_seed(cfg.seed, inst.id);
    record.provenance["source_label"] = label_name(inst.label);
    record.provenance["fidelity"] = {
        {"semantic", scored[best].scores.semantic},
        {"entity", scored[best].scores.entity},
        {"total", scored[best].scores.total}};
    records.push_back(std::move(record));
  }
  if (cfg.output_path.empty()) throw ValidationError("--output is required");
  save_records(records, cfg.output_path);
  std::cout << records.size() << " records written to " << cfg.output_path
            << "\n";
  return 0;
}

int cmd_evaluate(const CommonFlags& flags, const std::string& records_path) {
  PipelineConfig cfg = resolve_config(flags);
  const std::vector<Instance> dataset = load_input(cfg);
  const BackendSet backends = make_backends(cfg.backend, dataset);
  const std::vector<CounterfactualRecord> all_records =
      load_records(records_path);

  std::map<std::string, const Instance*> by_id;
  for (const Instance& inst : dataset) by_id[inst.id] = &inst;

  std::vector<CounterfactualRecord> claim_cf;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<std::string> claims;
  for (const CounterfactualRecord& r : all_records) {
    if (r.kind != RecordKind::CLAIM_CF) continue;
    auto it = by_id.find(r.source_id);
    if (it == by_id.end())
      throw ValidationError("record source_id not in dataset: " + r.source_id);
    claim_cf.push_back(r);
    pairs.emplace_back(r.claim, it->second->claim);
    claims.push_back(r.claim);
  }
  if (claim_cf.empty()) throw EmptyInputError("no CLAIM_CF records to evaluate");

  IntrinsicReport report;
  report.n_records = claim_cf.size();
  report.flip_rate = flip_rate(claim_cf, *backends.verifier);
  report.fluency_ppl = fluency_ppl(claims, *backends.scorer);
  report.similarity = similarity(pairs, *backends.embedder);
  report.diversity = diversity(pairs);
  report.multi_hop = multi_hop(claim_cf, *backends.embedder);

  std::cout << report_table(report);
  const std::string json_text = report_to_json(report).dump(2);
  if (!cfg.output_path.empty()) {
    std::ofstream out = open_output(cfg);
    out << json_text << '\n';
    std::cout << "report written to " << cfg.output_path << "\n";
  } else {
    std::cout << json_text << "\n";
  }
  return 0;
}

int cmd_augment_nei(const CommonFlags& flags) {
  PipelineConfig cfg = resolve_config(flags);
  const std::vector<Instance> dataset = load_input(cfg);
  CounterRng rng(cfg.seed);
  const std::vector<Instance> augmented = augment_nei(dataset, rng);
  if (cfg.output_path.empty()) throw ValidationError("--output is required");
  save_dataset(augmented, cfg.output_path);
  std::size_t nei = 0;
  for (const Instance& inst : augmented) nei += inst.label == Label::NEI;
  std::cout << augmented.size() << " instances (" << nei << " NEI) written to "
            << cfg.output_path << "\n";
  return 0;
}

int cmd_run(const CommonFlags& flags) {
  PipelineConfig cfg = resolve_config(flags);
  const std::vector<Instance> dataset = load_input(cfg);
  const BackendSet backends = make_backends(cfg.backend, dataset);
  const PipelineResult result = run_pipeline(dataset, cfg, backends);
  if (cfg.output_path.empty()) throw ValidationError("--output is required");
  save_records(result.records, cfg.output_path);
  if (!cfg.report_path.empty()) {
    std::ofstream out(cfg.report_path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + cfg.report_path);
    out << result.report.to_json().dump(2) << '\n';
  }
  std::cout << result.records.size() << " records from "
            << result.report.instances_emitted << "/"
            << result.report.instances_in << " instances written to "
            << cfg.output_path << "\n";
  for (const auto& [reason, count] : result.report.discards)
    std::cout << "  discarded " << count << ": " << reason << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"counterfactual data generation for multi-hop fact verification"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string candidates_path;
  std::string records_path;

  CLI::App* explain = app.add_subcommand("explain", "extract rationales");
  add_common_flags(explain, flags);
  CLI::App* edit = app.add_subcommand("edit", "edit evidence and ad-check");
  add_common_flags(edit, flags);
  CLI::App* generate =
      app.add_subcommand("generate", "generate candidate claims");
  add_common_flags(generate, flags);
  CLI::App* filter =
      app.add_subcommand("filter", "post-check and filter candidates");
  add_common_flags(filter, flags);
  filter->add_option("--candidates", candidates_path,
                     "candidates JSONL from `generate`")
      ->required();
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "intrinsic metrics over records");
  add_common_flags(evaluate, flags);
  evaluate->add_option("--records", records_path, "records JSONL from `run`")
      ->required();
  CLI::App* augment = app.add_subcommand("augment-nei", "add NEI instances");
  add_common_flags(augment, flags);
  CLI::App* run = app.add_subcommand("run", "full counterfactual pipeline");
  add_common_flags(run, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (explain->parsed()) return cmd_explain(flags);
    if (edit->parsed()) return cmd_edit(flags);
    if (generate->parsed()) return cmd_generate(flags);
    if (filter->parsed()) return cmd_filter(flags, candidates_path);
    if (evaluate->parsed()) return cmd_evaluate(flags, records_path);
    if (augment->parsed()) return cmd_augment_nei(flags);
    if (run->parsed()) return cmd_run(flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
