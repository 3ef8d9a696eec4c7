#include "cfgen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "cfgen/checking.hpp"
#include "cfgen/editor.hpp"
#include "cfgen/errors.hpp"
#include "cfgen/explainer.hpp"
#include "cfgen/filtering.hpp"
#include "cfgen/remote.hpp"
#include "cfgen/rng.hpp"
#include "cfgen/tokenizer.hpp"
#include "cfgen/toy_backends.hpp"

namespace cfgen {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

// ---------------------------------------------------------------------------
// serialization

nlohmann::ordered_json instance_to_json(const Instance& inst) {
  ordered_json j;
  j["id"] = inst.id;
  j["claim"] = inst.claim;
  j["label"] = label_name(inst.label);
  json evidence = json::array();
  for (const auto& item : inst.evidence)
    evidence.push_back(json::array({item.title, item.text}));
  j["evidence"] = evidence;
  return j;
}

Instance instance_from_json(const nlohmann::ordered_json& j) {
  Instance inst;
  inst.id = j.at("id").get<std::string>();
  inst.claim = j.at("claim").get<std::string>();
  auto label = parse_label(j.at("label").get<std::string>());
  if (!label)
    throw ValidationError("unknown label: " + j.at("label").get<std::string>());
  inst.label = *label;
  for (const auto& pair : j.at("evidence")) {
    if (!pair.is_array() || pair.size() != 2)
      throw ValidationError("evidence entry must be a [title, text] pair");
    inst.evidence.push_back(EvidenceItem{pair[0].get<std::string>(),
                                         pair[1].get<std::string>()});
  }
  validate_instance(inst);
  return inst;
}

nlohmann::ordered_json record_to_json(const CounterfactualRecord& record) {
  ordered_json j;
  j["source_id"] = record.source_id;
  j["kind"] = record_kind_name(record.kind);
  j["claim"] = record.claim;
  json evidence = json::array();
  for (const auto& item : record.evidence)
    evidence.push_back(json::array({item.title, item.text}));
  j["evidence"] = evidence;
  j["label"] = label_name(record.label);
  j["provenance"] = record.provenance;
  return j;
}

CounterfactualRecord record_from_json(const nlohmann::ordered_json& j) {
  CounterfactualRecord record;
  record.source_id = j.at("source_id").get<std::string>();
  auto kind = parse_record_kind(j.at("kind").get<std::string>());
  if (!kind)
    throw ValidationError("unknown record kind: " +
                          j.at("kind").get<std::string>());
  record.kind = *kind;
  record.claim = j.at("claim").get<std::string>();
  for (const auto& pair : j.at("evidence")) {
    if (!pair.is_array() || pair.size() != 2)
      throw ValidationError("evidence entry must be a [title, text] pair");
    record.evidence.push_back(EvidenceItem{pair[0].get<std::string>(),
                                           pair[1].get<std::string>()});
  }
  auto label = parse_label(j.at("label").get<std::string>());
  if (!label)
    throw ValidationError("unknown label: " + j.at("label").get<std::string>());
  record.label = *label;
  record.provenance = j.at("provenance");
  return record;
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

template <typename Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), i + 1);
    }
    try {
      fn(j);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad record shape: ") + e.what(), i + 1);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), i + 1);
    }
  }
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

}  // namespace

std::vector<Instance> load_dataset(const std::string& path) {
  std::vector<Instance> dataset;
  for_each_jsonl(path, [&dataset](const ordered_json& j) {
    dataset.push_back(instance_from_json(j));
  });
  return dataset;
}

void save_dataset(const std::vector<Instance>& dataset,
                  const std::string& path) {
  std::ofstream out = open_for_write(path);
  for (const Instance& inst : dataset)
    out << instance_to_json(inst).dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<CounterfactualRecord> load_records(const std::string& path) {
  std::vector<CounterfactualRecord> records;
  for_each_jsonl(path, [&records](const ordered_json& j) {
    records.push_back(record_from_json(j));
  });
  return records;
}

void save_records(const std::vector<CounterfactualRecord>& records,
                  const std::string& path) {
  std::ofstream out = open_for_write(path);
  for (const CounterfactualRecord& record : records)
    out << record_to_json(record).dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

void attach_gold_rationales(std::vector<Instance>& dataset,
                            const std::string& path) {
  std::map<std::string, Rationales> by_id;
  for_each_jsonl(path, [&by_id](const ordered_json& j) {
    Rationales rats;
    rats.sentence_mask = j.at("sentence_mask").get<std::vector<bool>>();
    for (const auto& spans : j.at("token_spans")) {
      std::vector<Span> row;
      for (const auto& span : spans) {
        if (!span.is_array() || span.size() != 2)
          throw ValidationError("token span must be a [start, end] pair");
        row.push_back(Span{span[0].get<std::size_t>(),
                           span[1].get<std::size_t>()});
      }
      rats.token_spans.push_back(std::move(row));
    }
    by_id[j.at("id").get<std::string>()] = std::move(rats);
  });
  for (Instance& inst : dataset) {
    auto it = by_id.find(inst.id);
    if (it == by_id.end()) continue;
    validate_rationales(inst, it->second);
    inst.gold_rationales = it->second;
  }
}

void save_rationales(
    const std::vector<std::pair<std::string, Rationales>>& rows,
    const std::string& path) {
  std::ofstream out = open_for_write(path);
  for (const auto& [id, rats] : rows) {
    ordered_json j;
    j["id"] = id;
    j["sentence_mask"] = rats.sentence_mask;
    json spans = json::array();
    for (const auto& row : rats.token_spans) {
      json row_json = json::array();
      for (const Span& s : row) row_json.push_back(json::array({s.start, s.end}));
      spans.push_back(row_json);
    }
    j["token_spans"] = spans;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// config

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid config JSON: ") + e.what(), 1);
  }
  PipelineConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "k") {
      cfg.generator.k = value.get<std::size_t>();
    } else if (key == "beam_size") {
      cfg.generator.beam_size = value.get<std::size_t>();
    } else if (key == "max_length") {
      cfg.generator.max_length = value.get<std::size_t>();
    } else if (key == "backend") {
      cfg.backend = value.get<std::string>();
    } else if (key == "input") {
      cfg.input_path = value.get<std::string>();
    } else if (key == "output") {
      cfg.output_path = value.get<std::string>();
    } else if (key == "report") {
      cfg.report_path = value.get<std::string>();
    } else if (key == "rationales") {
      cfg.rationales_path = value.get<std::string>();
    } else if (key == "emit_evidence_cf") {
      cfg.emit_evidence_cf = value.get<bool>();
    } else if (key == "jobs") {
      cfg.jobs = value.get<std::size_t>();
    } else {
      throw ValidationError("unknown config key: " + key);
    }
  }
  return cfg;
}

nlohmann::ordered_json config_to_json(const PipelineConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;
  j["k"] = cfg.generator.k;
  j["beam_size"] = cfg.generator.beam_size;
  j["max_length"] = cfg.generator.max_length;
  j["backend"] = cfg.backend;
  j["input"] = cfg.input_path;
  j["output"] = cfg.output_path;
  j["report"] = cfg.report_path;
  j["rationales"] = cfg.rationales_path;
  j["emit_evidence_cf"] = cfg.emit_evidence_cf;
  j["jobs"] = cfg.jobs;
  return j;
}

// ---------------------------------------------------------------------------
// backends

namespace {

std::vector<std::string> corpus_texts(const std::vector<Instance>& dataset) {
  std::vector<std::string> texts;
  for (const Instance& inst : dataset) {
    texts.push_back(inst.claim);
    for (const auto& item : inst.evidence) {
      if (!item.title.empty()) texts.push_back(item.title);
      texts.push_back(item.text);
    }
  }
  return texts;
}

std::vector<std::string> scorer_training_texts(
    const std::vector<Instance>& dataset) {
  std::vector<std::string> texts;
  for (const Instance& inst : dataset) {
    texts.push_back(inst.claim);
    for (const auto& item : inst.evidence) texts.push_back(item.text);
  }
  return texts;
}

// Backend calls are serialized behind one mutex when an implementation
// declares itself unsafe for concurrent use.
class LockedScorer : public TokenScorer {
 public:
  LockedScorer(std::shared_ptr<const TokenScorer> inner,
               std::shared_ptr<std::mutex> mutex)
      : inner_(std::move(inner)), mutex_(std::move(mutex)) {}
  const Vocabulary& vocab() const override { return inner_->vocab(); }
  std::vector<double> score_next_tokens(
      const std::vector<TokenId>& context,
      const std::vector<TokenId>& prefix) const override {
    std::lock_guard<std::mutex> lock(*mutex_);
    return inner_->score_next_tokens(context, prefix);
  }

 private:
  std::shared_ptr<const TokenScorer> inner_;
  std::shared_ptr<std::mutex> mutex_;
};

class LockedEmbedder : public EmbeddingProvider {
 public:
  LockedEmbedder(std::shared_ptr<const EmbeddingProvider> inner,
                 std::shared_ptr<std::mutex> mutex)
      : inner_(std::move(inner)), mutex_(std::move(mutex)) {}
  std::size_t dimension() const override { return inner_->dimension(); }
  std::vector<std::vector<double>> embed(
      const std::string& text) const override {
    std::lock_guard<std::mutex> lock(*mutex_);
    return inner_->embed(text);
  }

 private:
  std::shared_ptr<const EmbeddingProvider> inner_;
  std::shared_ptr<std::mutex> mutex_;
};

class LockedRecognizer : public EntityRecognizer {
 public:
  LockedRecognizer(std::shared_ptr<const EntityRecognizer> inner,
                   std::shared_ptr<std::mutex> mutex)
      : inner_(std::move(inner)), mutex_(std::move(mutex)) {}
  std::vector<Entity> recognize(const std::string& text) const override {
    std::lock_guard<std::mutex> lock(*mutex_);
    return inner_->recognize(text);
  }

 private:
  std::shared_ptr<const EntityRecognizer> inner_;
  std::shared_ptr<std::mutex> mutex_;
};

class LockedVerifier : public Verifier {
 public:
  LockedVerifier(std::shared_ptr<const Verifier> inner,
                 std::shared_ptr<std::mutex> mutex)
      : inner_(std::move(inner)), mutex_(std::move(mutex)) {}
  VerifyResult verify(const std::string& claim,
                      const Evidence& evidence) const override {
    std::lock_guard<std::mutex> lock(*mutex_);
    return inner_->verify(claim, evidence);
  }

 private:
  std::shared_ptr<const Verifier> inner_;
  std::shared_ptr<std::mutex> mutex_;
};

BackendSet lock_unsafe_backends(BackendSet backends) {
  auto mutex = std::make_shared<std::mutex>();
  if (!backends.scorer->concurrent_safe())
    backends.scorer = std::make_shared<LockedScorer>(backends.scorer, mutex);
  if (!backends.embedder->concurrent_safe())
    backends.embedder =
        std::make_shared<LockedEmbedder>(backends.embedder, mutex);
  if (!backends.recognizer->concurrent_safe())
    backends.recognizer =
        std::make_shared<LockedRecognizer>(backends.recognizer, mutex);
  if (!backends.verifier->concurrent_safe())
    backends.verifier =
        std::make_shared<LockedVerifier>(backends.verifier, mutex);
  return backends;
}

constexpr double kScorerAlpha = 0.1;
constexpr double kScorerContextBoost = 8.0;
constexpr std::size_t kEmbeddingDim = 16;
constexpr std::uint64_t kEmbeddingSeed = 0x5eedf00dULL;

}  // namespace

BackendSet make_backends(const std::string& selector,
                         const std::vector<Instance>& dataset) {
  const Vocabulary vocab = Vocabulary::from_texts(corpus_texts(dataset));
  BackendSet backends;
  if (selector == "toy") {
    auto recognizer =
        std::make_shared<const GazetteerRecognizer>(default_gazetteer());
    backends.scorer = std::make_shared<const BigramScorer>(
        vocab, scorer_training_texts(dataset), kScorerAlpha,
        kScorerContextBoost);
    backends.embedder =
        std::make_shared<const HashEmbedder>(kEmbeddingDim, kEmbeddingSeed);
    backends.recognizer = recognizer;
    backends.verifier = std::make_shared<const EntityOverlapVerifier>(recognizer);
    return backends;
  }
  if (selector.rfind("remote:", 0) == 0) {
    RemoteOptions options;
    options.base_url = selector.substr(7);
    backends.scorer = std::make_shared<const RemoteScorer>(vocab, options);
    backends.embedder = std::make_shared<const RemoteEmbedder>(options);
    backends.recognizer = std::make_shared<const RemoteRecognizer>(options);
    backends.verifier = std::make_shared<const RemoteVerifier>(options);
    return backends;
  }
  throw ValidationError("unknown backend selector: " + selector +
                        " (expected 'toy' or 'remote:<url>')");
}

// ---------------------------------------------------------------------------
// run report

std::size_t RunReport::discarded_total() const {
  std::size_t total = 0;
  for (const auto& [reason, count] : discards) total += count;
  return total;
}

bool RunReport::conserved() const {
  return instances_in == instances_emitted + discarded_total();
}

nlohmann::ordered_json RunReport::to_json() const {
  ordered_json j;
  j["instances_in"] = instances_in;
  j["instances_emitted"] = instances_emitted;
  j["discards"] = discards;
  j["records_by_kind"] = records_by_kind;
  j["records_by_label"] = records_by_label;
  j["stage_seconds"] = stage_seconds;
  return j;
}

// ---------------------------------------------------------------------------
// pipeline

namespace {

struct InstanceOutcome {
  std::vector<CounterfactualRecord> records;
  std::string discard_reason;  // empty when records were emitted
  std::map<std::string, double> stage_seconds;
};

ordered_json constraints_to_json(const ConstraintSet& cons,
                                 const Vocabulary& vocab) {
  ordered_json groups = ordered_json::array();
  for (const auto& group : cons.groups) {
    ordered_json g;
    g["evidence_index"] = group.evidence_index;
    ordered_json phrases = ordered_json::array();
    for (const auto& phrase : group.phrases)
      phrases.push_back(vocab.detokenize(phrase));
    g["phrases"] = phrases;
    groups.push_back(g);
  }
  return groups;
}

ordered_json scores_to_json(const VerifyResult& v) {
  ordered_json j;
  j["label"] = label_name(v.label);
  ordered_json scores;
  for (Label y : {Label::SUP, Label::REF, Label::NEI})
    scores[label_name(y)] = v.scores.at(y);
  j["scores"] = scores;
  return j;
}

class StageTimer {
 public:
  StageTimer(std::map<std::string, double>& sink, std::string stage)
      : sink_(sink),
        stage_(std::move(stage)),
        start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() { sink_[stage_] += seconds_since(start_); }

 private:
  std::map<std::string, double>& sink_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

// Emission recheck, independent of the search's satisfaction flags: the
// claim must contain, per group, one phrase as a contiguous word sequence.
bool claim_satisfies_constraints(const std::string& claim,
                                 const ConstraintSet& cons,
                                 const Vocabulary& vocab) {
  const std::vector<std::string> words = tokenize_words(claim);
  for (const auto& group : cons.groups) {
    bool any = false;
    for (const auto& phrase : group.phrases) {
      const std::vector<std::string> target =
          tokenize_words(vocab.detokenize(phrase));
      if (target.empty() || target.size() > words.size()) continue;
      for (std::size_t s = 0; s + target.size() <= words.size() && !any; ++s) {
        any = std::equal(target.begin(), target.end(), words.begin() + s);
      }
      if (any) break;
    }
    if (!any) return false;
  }
  return true;
}

InstanceOutcome process_instance(const Instance& inst,
                                 const PipelineConfig& cfg,
                                 const BackendSet& backends,
                                 const EntityPools& pools) {
  InstanceOutcome outcome;
  const std::uint64_t seed = instance_seed(cfg.seed, inst.id);

  try {
    validate_instance(inst);
    if (inst.label == Label::NEI) {
      outcome.discard_reason = "invalid-label";
      return outcome;
    }

    Rationales rats;
    {
      StageTimer timer(outcome.stage_seconds, "explain");
      if (inst.gold_rationales) {
        rats = OracleExtractor().extract(inst);
      } else {
        rats = HeuristicExtractor().extract(inst);
      }
    }

    EntitySet causal = collect_causal_entities(inst, rats, *backends.recognizer);

    ordered_json edit_trace;
    ordered_json ad_trace;
    const Evidence* generation_evidence = &inst.evidence;
    EntitySet generation_entities = causal;
    Evidence edited_evidence;

    if (inst.label == Label::SUP) {
      StageTimer timer(outcome.stage_seconds, "edit");
      CounterRng rng(seed);
      const EditPlan plan = plan_edits(causal, pools, rng);
      EditResult edited = apply_edits(inst.evidence, causal, plan);

      ordered_json ops = ordered_json::array();
      for (const EditOp& op : plan.ops) ops.push_back(describe(op));
      edit_trace["ops"] = ops;

      const AdDecision decision =
          ad_check(inst.claim, edited.evidence, *backends.verifier);
      ad_trace = scores_to_json(decision.verdict);
      if (!decision.keep) {
        outcome.discard_reason = "ad-check-" + decision.discard_reason;
        return outcome;
      }

      edited_evidence = std::move(edited.evidence);
      generation_evidence = &edited_evidence;
      generation_entities = std::move(edited.entities);

      if (cfg.emit_evidence_cf) {
        CounterfactualRecord record;
        record.source_id = inst.id;
        record.kind = RecordKind::EVIDENCE_CF;
        record.claim = inst.claim;
        record.evidence = edited_evidence;
        record.label = Label::REF;
        record.provenance["seed"] = seed;
        record.provenance["source_label"] = label_name(inst.label);
        record.provenance["edit"] = edit_trace;
        record.provenance["ad_check"] = ad_trace;
        outcome.records.push_back(std::move(record));
      }
    }

    ConstraintSet cons;
    GeneratedCandidates generated;
    {
      StageTimer timer(outcome.stage_seconds, "generate");
      cons = build_constraints(generation_entities, *backends.scorer);
      generated = generate_candidates(rats, *generation_evidence,
                                      generation_entities, *backends.scorer,
                                      cfg.generator);
    }

    std::vector<CheckedCandidate> checked;
    {
      StageTimer timer(outcome.stage_seconds, "post_check");
      checked = post_check(generated.claims, inst.evidence, inst.label,
                           *backends.verifier);
    }
    if (checked.empty()) {
      if (outcome.records.empty()) outcome.discard_reason = "no-flipped-candidate";
      return outcome;
    }

    // Downstream training is two-way; NEI-predicted candidates are counted
    // but never emitted.
    std::size_t excluded_nei = 0;
    std::vector<CheckedCandidate> two_way;
    for (CheckedCandidate& c : checked) {
      if (c.predicted == Label::NEI) {
        ++excluded_nei;
      } else {
        two_way.push_back(std::move(c));
      }
    }
    if (two_way.empty()) {
      if (outcome.records.empty()) outcome.discard_reason = "no-two-way-candidate";
      return outcome;
    }

    std::vector<ScoredCandidate> scored;
    ordered_json ledger = ordered_json::array();
    {
      StageTimer timer(outcome.stage_seconds, "filter");
      for (const CheckedCandidate& c : two_way) {
        const double semantic =
            semantic_fidelity(c.claim, inst.claim, *backends.embedder);
        const double entity =
            entity_fidelity(c.claim, inst.claim, *backends.recognizer);
        scored.push_back(
            ScoredCandidate{c.claim, c.predicted, make_fidelity(semantic, entity)});
        ordered_json row;
        row["claim"] = c.claim;
        row["label"] = label_name(c.predicted);
        row["semantic"] = semantic;
        row["entity"] = entity;
        row["total"] = semantic + entity;
        ledger.push_back(row);
      }
    }
    const std::size_t best = select_best(scored);

    if (scored[best].predicted == inst.label ||
        !claim_satisfies_constraints(scored[best].claim, cons,
                                     backends.scorer->vocab())) {
      if (outcome.records.empty())
        outcome.discard_reason = "emission-recheck-failed";
      return outcome;
    }

    CounterfactualRecord record;
    record.source_id = inst.id;
    record.kind = RecordKind::CLAIM_CF;
    record.claim = scored[best].claim;
    record.evidence = inst.evidence;
    record.label = scored[best].predicted;
    record.provenance["seed"] = seed;
    record.provenance["source_label"] = label_name(inst.label);
    if (inst.label == Label::SUP) {
      record.provenance["edit"] = edit_trace;
      record.provenance["ad_check"] = ad_trace;
    }
    record.provenance["constraints"] =
        constraints_to_json(cons, backends.scorer->vocab());
    {
      ordered_json generation;
      generation["requested"] = cfg.generator.k;
      generation["returned"] = generated.claims.size();
      generation["shortfall"] = generated.shortfall;
      record.provenance["generation"] = generation;
    }
    {
      ordered_json post;
      post["retained"] = checked.size();
      post["excluded_nei"] = excluded_nei;
      record.provenance["post_check"] = post;
    }
    {
      ordered_json fidelity;
      fidelity["semantic"] = scored[best].scores.semantic;
      fidelity["entity"] = scored[best].scores.entity;
      fidelity["total"] = scored[best].scores.total;
      fidelity["candidates"] = ledger;
      record.provenance["fidelity"] = fidelity;
    }
    outcome.records.push_back(std::move(record));
    return outcome;
  } catch (const EmptyRationaleError&) {
    outcome.discard_reason = "empty-rationale";
  } catch (const NoEditPossibleError&) {
    outcome.discard_reason = "no-edit-possible";
  } catch (const EmptyConstraintsError&) {
    outcome.discard_reason = "empty-constraints";
  } catch (const NoSatisfyingHypothesisError&) {
    outcome.discard_reason = "no-satisfying-hypothesis";
  } catch (const BackendUnavailableError&) {
    outcome.discard_reason = "backend-unavailable";
  } catch (const ValidationError&) {
    outcome.discard_reason = "validation-error";
  } catch (const UnknownTokenError&) {
    outcome.discard_reason = "unknown-token";
  }
  outcome.records.clear();  // a failed instance emits nothing
  return outcome;
}

}  // namespace

PipelineResult run_pipeline(const std::vector<Instance>& dataset,
                            const PipelineConfig& cfg,
                            const BackendSet& raw_backends) {
  const auto run_start = std::chrono::steady_clock::now();
  const BackendSet backends = cfg.jobs > 1
                                  ? lock_unsafe_backends(raw_backends)
                                  : raw_backends;

  PipelineResult result;
  result.report.instances_in = dataset.size();

  EntityPools pools;
  {
    const auto start = std::chrono::steady_clock::now();
    if (!dataset.empty())
      pools = build_entity_pools(dataset, *backends.recognizer);
    result.report.stage_seconds["build_pools"] = seconds_since(start);
  }

  std::vector<InstanceOutcome> outcomes(dataset.size());
  const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < dataset.size(); ++i)
      outcomes[i] = process_instance(dataset[i], cfg, backends, pools);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= dataset.size()) break;
          outcomes[i] = process_instance(dataset[i], cfg, backends, pools);
        }
      });
    }
    for (auto& worker : workers) worker.join();
  }

  for (std::size_t i = 0; i < dataset.size(); ++i) {
    InstanceOutcome& outcome = outcomes[i];
    for (const auto& [stage, secs] : outcome.stage_seconds)
      result.report.stage_seconds[stage] += secs;
    if (outcome.records.empty()) {
      const std::string reason = outcome.discard_reason.empty()
                                     ? "no-record"
                                     : outcome.discard_reason;
      ++result.report.discards[reason];
      continue;
    }
    ++result.report.instances_emitted;
    for (CounterfactualRecord& record : outcome.records) {
      ++result.report.records_by_kind[record_kind_name(record.kind)];
      ++result.report.records_by_label[label_name(record.label)];
      result.records.push_back(std::move(record));
    }
  }

  // Order-stable output: by source id, evidence counterfactuals first.
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const CounterfactualRecord& a,
                      const CounterfactualRecord& b) {
                     if (a.source_id != b.source_id)
                       return a.source_id < b.source_id;
                     return a.kind == RecordKind::EVIDENCE_CF &&
                            b.kind == RecordKind::CLAIM_CF;
                   });

  result.report.stage_seconds["total"] = seconds_since(run_start);
  return result;
}

}  // namespace cfgen
