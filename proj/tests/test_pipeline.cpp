#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "cfgen/errors.hpp"
#include "cfgen/pipeline.hpp"
#include "cfgen/toy_backends.hpp"
#include "test_support.hpp"

using namespace cfgen;
using namespace cfgen::test;

namespace {

const std::string kCorpusPath =
    std::string(CFGEN_SOURCE_DIR) + "/data/toy_corpus.jsonl";

std::string temp_path(const std::string& name) {
  return "/tmp/cfgen-test-" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

PipelineConfig toy_config() {
  PipelineConfig cfg;
  cfg.seed = 42;
  cfg.emit_evidence_cf = true;
  return cfg;
}

}  // namespace

TEST_CASE("the bundled toy corpus loads as 20 valid instances") {
  const std::vector<Instance> dataset = load_dataset(kCorpusPath);
  CHECK(dataset.size() == 20);
  std::size_t sup = 0, ref = 0;
  for (const Instance& inst : dataset) {
    CHECK_NOTHROW(validate_instance(inst));
    sup += inst.label == Label::SUP;
    ref += inst.label == Label::REF;
  }
  CHECK(sup == 12);
  CHECK(ref == 8);
}

TEST_CASE("a malformed line is reported with its line number") {
  const std::string path = temp_path("malformed.jsonl");
  {
    std::ofstream out(path);
    const std::string good =
        R"({"id":"a","claim":"c","label":"SUP","evidence":[["t","e"]]})";
    for (int i = 0; i < 6; ++i) out << good << "\n";
    out << "{not json}\n";
  }
  try {
    load_dataset(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 7);
  }
  std::remove(path.c_str());
}

TEST_CASE("record save-then-load is the identity") {
  const std::vector<Instance> dataset = load_dataset(kCorpusPath);
  const BackendSet backends = make_backends("toy", dataset);
  const PipelineResult result = run_pipeline(dataset, toy_config(), backends);
  REQUIRE(!result.records.empty());

  const std::string path = temp_path("roundtrip.jsonl");
  save_records(result.records, path);
  const std::vector<CounterfactualRecord> loaded = load_records(path);
  REQUIRE(loaded.size() == result.records.size());
  for (std::size_t i = 0; i < loaded.size(); ++i)
    CHECK(loaded[i] == result.records[i]);
  std::remove(path.c_str());
}

TEST_CASE("repeated runs write byte-identical output") {
  const std::vector<Instance> dataset = load_dataset(kCorpusPath);
  const BackendSet backends = make_backends("toy", dataset);
  const std::string path_a = temp_path("golden-a.jsonl");
  const std::string path_b = temp_path("golden-b.jsonl");
  save_records(run_pipeline(dataset, toy_config(), backends).records, path_a);
  save_records(run_pipeline(dataset, toy_config(), backends).records, path_b);
  CHECK(slurp(path_a) == slurp(path_b));
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

TEST_CASE("worker-pool runs equal the single-threaded run") {
  const std::vector<Instance> dataset = load_dataset(kCorpusPath);
  const BackendSet backends = make_backends("toy", dataset);
  const PipelineResult solo = run_pipeline(dataset, toy_config(), backends);
  PipelineConfig parallel = toy_config();
  parallel.jobs = 4;
  const PipelineResult pooled = run_pipeline(dataset, parallel, backends);
  REQUIRE(solo.records.size() == pooled.records.size());
  for (std::size_t i = 0; i < solo.records.size(); ++i)
    CHECK(solo.records[i] == pooled.records[i]);
}

TEST_CASE("the run report conserves instances") {
  const std::vector<Instance> dataset = load_dataset(kCorpusPath);
  const BackendSet backends = make_backends("toy", dataset);
  const PipelineResult result = run_pipeline(dataset, toy_config(), backends);
  CHECK(result.report.instances_in == 20);
  CHECK(result.report.conserved());
  CHECK(result.report.discards.count("ad-check-under-edited") == 1);
  CHECK(result.report.discards.count("ad-check-over-edited") == 1);
  CHECK(result.report.discards.count("empty-rationale") == 1);
}

TEST_CASE("SUP route emits evidence and claim counterfactuals") {
  const std::vector<Instance> dataset = load_dataset(kCorpusPath);
  const BackendSet backends = make_backends("toy", dataset);
  const PipelineResult result = run_pipeline(dataset, toy_config(), backends);

  bool saw_evidence_cf = false, saw_claim_cf_from_sup = false;
  for (const CounterfactualRecord& r : result.records) {
    const std::string source_label =
        r.provenance.at("source_label").get<std::string>();
    if (r.kind == RecordKind::EVIDENCE_CF) {
      saw_evidence_cf = true;
      CHECK(r.label == Label::REF);
      CHECK(source_label == "SUP");
      // evidence counterfactuals keep the original claim
      bool found = false;
      for (const Instance& inst : dataset)
        found = found || (inst.id == r.source_id && inst.claim == r.claim);
      CHECK(found);
    } else {
      CHECK(label_name(r.label) != source_label);
      if (source_label == "SUP") saw_claim_cf_from_sup = true;
      if (source_label == "REF") CHECK(r.label == Label::SUP);
    }
  }
  CHECK(saw_evidence_cf);
  CHECK(saw_claim_cf_from_sup);
}

TEST_CASE("evidence counterfactuals are withheld without the flag") {
  const std::vector<Instance> dataset = load_dataset(kCorpusPath);
  const BackendSet backends = make_backends("toy", dataset);
  PipelineConfig cfg = toy_config();
  cfg.emit_evidence_cf = false;
  const PipelineResult result = run_pipeline(dataset, cfg, backends);
  for (const CounterfactualRecord& r : result.records)
    CHECK(r.kind == RecordKind::CLAIM_CF);
}

TEST_CASE("emitted claim counterfactuals re-verify constraints and flip") {
  const std::vector<Instance> dataset = load_dataset(kCorpusPath);
  std::map<std::string, const Instance*> by_id;
  for (const Instance& inst : dataset) by_id[inst.id] = &inst;

  const BackendSet backends = make_backends("toy", dataset);
  const PipelineResult result = run_pipeline(dataset, toy_config(), backends);
  std::size_t checked = 0;
  for (const CounterfactualRecord& r : result.records) {
    if (r.kind != RecordKind::CLAIM_CF) continue;
    // label flips against the source instance
    CHECK(r.label != by_id.at(r.source_id)->label);
    // claim contains one recorded constraint phrase per group
    std::vector<std::vector<std::string>> groups;
    for (const auto& g : r.provenance.at("constraints"))
      groups.push_back(g.at("phrases").get<std::vector<std::string>>());
    REQUIRE(!groups.empty());
    CHECK(claim_satisfies(r.claim, groups));
    ++checked;
  }
  CHECK(checked > 5);
}

TEST_CASE("NEI input instances are dropped with a reason, run continues") {
  std::vector<Instance> dataset = load_dataset(kCorpusPath);
  dataset[0].label = Label::NEI;
  const BackendSet backends = make_backends("toy", dataset);
  const PipelineResult result = run_pipeline(dataset, toy_config(), backends);
  CHECK(result.report.discards.at("invalid-label") == 1);
  CHECK(result.report.conserved());
}

TEST_CASE("config files load and unknown keys are rejected") {
  const std::string path = temp_path("config.json");
  {
    std::ofstream out(path);
    out << R"({"seed": 7, "k": 4, "beam_size": 12, "max_length": 40,
               "backend": "toy", "emit_evidence_cf": true, "jobs": 2})";
  }
  const PipelineConfig cfg = load_config(path);
  CHECK(cfg.seed == 7);
  CHECK(cfg.generator.k == 4);
  CHECK(cfg.generator.beam_size == 12);
  CHECK(cfg.generator.max_length == 40);
  CHECK(cfg.emit_evidence_cf);
  CHECK(cfg.jobs == 2);

  {
    std::ofstream out(path);
    out << R"({"seeed": 7})";
  }
  CHECK_THROWS_AS(load_config(path), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("gold rationales attach by id and are honored") {
  std::vector<Instance> dataset = load_dataset(kCorpusPath);
  const std::string path = temp_path("gold.jsonl");
  {
    // mask only the first sentence of hv01, spans over "Silver Arrow Racing"
    std::vector<std::pair<std::string, Rationales>> rows;
    Rationales rats;
    rats.sentence_mask = {true, false, false};
    const std::string& text = dataset[0].evidence[0].text;
    rats.token_spans.resize(3);
    rats.token_spans[0] = {Span{0, 6}, Span{7, 12}, Span{13, 19}};
    REQUIRE(text.substr(0, 6) == "Silver");
    rows.emplace_back("hv01", rats);
    save_rationales(rows, path);
  }
  attach_gold_rationales(dataset, path);
  REQUIRE(dataset[0].gold_rationales.has_value());
  CHECK(dataset[0].gold_rationales->sentence_mask ==
        std::vector<bool>{true, false, false});
  for (std::size_t i = 1; i < dataset.size(); ++i)
    CHECK_FALSE(dataset[i].gold_rationales.has_value());
  std::remove(path.c_str());
}

TEST_CASE("every emitted record keeps the configured seed in provenance") {
  const std::vector<Instance> dataset = load_dataset(kCorpusPath);
  const BackendSet backends = make_backends("toy", dataset);
  const PipelineResult result = run_pipeline(dataset, toy_config(), backends);
  for (const CounterfactualRecord& r : result.records) {
    CHECK(r.provenance.contains("seed"));
    CHECK(r.provenance.at("seed").get<std::uint64_t>() ==
          instance_seed(42, r.source_id));
  }
}
