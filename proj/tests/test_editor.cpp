#include <doctest.h>

#include <set>

#include "cfgen/editor.hpp"
#include "cfgen/errors.hpp"
#include "cfgen/explainer.hpp"
#include "cfgen/toy_backends.hpp"

using namespace cfgen;

namespace {

GazetteerRecognizer table_one_recognizer() {
  return GazetteerRecognizer(Gazetteer{
      {"Patrick Carpentier"}, {"Ford Fusion", "NASCAR Sprint Cup Series"}, {}});
}

// Three-hop instance in the style of a motorsport article chain.
Instance table_one_instance() {
  Instance inst;
  inst.id = "t1";
  inst.claim =
      "The Ford Fusion was introduced for model year 2006 and the 1997 rookie "
      "drives it in the NASCAR Sprint Cup Series.";
  inst.evidence = {
      {"Ford Fusion", "Ford Fusion was introduced for the 2006 model year."},
      {"Patrick Carpentier",
       "Patrick Carpentier competed in the NASCAR Sprint Cup Series driving "
       "the Ford Fusion."},
      {"1997 season", "The 1997 season rookie award went to Patrick Carpentier."}};
  inst.label = Label::SUP;
  return inst;
}

std::size_t count_occurrences(const std::string& text, const std::string& s) {
  std::size_t count = 0, pos = 0;
  while ((pos = text.find(s, pos)) != std::string::npos) {
    ++count;
    pos += s.size();
  }
  return count;
}

std::size_t evidence_occurrences(const Evidence& evidence,
                                 const std::string& s) {
  std::size_t count = 0;
  for (const auto& item : evidence)
    count += count_occurrences(item.text, s) + count_occurrences(item.title, s);
  return count;
}

}  // namespace

TEST_CASE("causal entities are the recognized entities inside token spans") {
  const Instance inst = table_one_instance();
  const GazetteerRecognizer ner = table_one_recognizer();
  const Rationales rats = HeuristicExtractor().extract(inst);
  const EntitySet causal = collect_causal_entities(inst, rats, ner);

  std::set<std::string> surfaces;
  for (const Entity& e : causal.entities) surfaces.insert(e.surface);
  CHECK(surfaces.count("Ford Fusion") == 1);
  CHECK(surfaces.count("Patrick Carpentier") == 1);
  CHECK(surfaces.count("1997") == 1);
  CHECK(surfaces.count("2006") == 1);
}

TEST_CASE("entities outside every token span are excluded") {
  Instance inst;
  inst.id = "t2";
  inst.claim = "The race was long.";
  inst.evidence = {
      {"", "The race was long and Patrick Carpentier still finished."}};
  inst.label = Label::SUP;
  // only "race" and "long" are claim words, so the PERSON is outside spans
  Rationales rats = HeuristicExtractor().extract(inst);
  const EntitySet causal =
      collect_causal_entities(inst, rats, table_one_recognizer());
  CHECK(causal.empty());
}

TEST_CASE("pools collect every GPE, DATE and NUM surface once") {
  std::vector<Instance> dataset(2);
  dataset[0].id = "p1";
  dataset[0].claim = "model years";
  dataset[0].evidence = {{"", "Introduced for the 2006 model year in Arizona."}};
  dataset[0].label = Label::SUP;
  dataset[1].id = "p2";
  dataset[1].claim = "model years";
  dataset[1].evidence = {{"", "Updated for the 2008 model year in Arizona."}};
  dataset[1].label = Label::REF;

  GazetteerRecognizer ner(Gazetteer{{}, {}, {"Arizona"}});
  const EntityPools pools = build_entity_pools(dataset, ner);
  CHECK(pools.date == std::vector<std::string>{"2006", "2008"});
  CHECK(pools.gpe == std::vector<std::string>{"Arizona"});  // deduplicated
  CHECK(pools.num.empty());
}

TEST_CASE("a single admissible pool entry forces the replacement") {
  Instance inst;
  inst.id = "t3";
  inst.claim = "Arizona hosts the race.";
  inst.evidence = {{"", "Arizona hosts the race."}};
  inst.label = Label::SUP;
  GazetteerRecognizer ner(Gazetteer{{}, {}, {"Arizona", "Texas"}});
  const EntitySet causal = collect_causal_entities(
      inst, HeuristicExtractor().extract(inst), ner);
  EntityPools pools;
  pools.gpe = {"Arizona", "Texas"};

  CounterRng rng(1);
  const EditPlan plan = plan_edits(causal, pools, rng);
  REQUIRE(plan.ops.size() == 1);
  const auto& rep = std::get<ReplaceOp>(plan.ops[0]);
  CHECK(rep.old_surface == "Arizona");
  CHECK(rep.new_surface == "Texas");
}

TEST_CASE("exactly two cross-evidence persons get swapped") {
  Instance inst;
  inst.id = "t4";
  inst.claim = "Reg Presley wrote the song and Mike Newell directed the film.";
  inst.evidence = {{"Reg Presley", "Reg Presley wrote the song."},
                   {"Mike Newell", "Mike Newell directed the film."}};
  inst.label = Label::SUP;
  GazetteerRecognizer ner(Gazetteer{{"Reg Presley", "Mike Newell"}, {}, {}});
  const EntitySet causal = collect_causal_entities(
      inst, HeuristicExtractor().extract(inst), ner);

  CounterRng rng(5);
  const EditPlan plan = plan_edits(causal, EntityPools{}, rng);
  REQUIRE(plan.ops.size() == 1);
  const auto& swap = std::get<SwapOp>(plan.ops[0]);
  CHECK(((swap.surface_a == "Mike Newell" && swap.surface_b == "Reg Presley") ||
         (swap.surface_a == "Reg Presley" && swap.surface_b == "Mike Newell")));
}

TEST_CASE("one person and empty pools leaves no edit") {
  Instance inst;
  inst.id = "t5";
  inst.claim = "Reg Presley wrote the song.";
  inst.evidence = {{"", "Reg Presley wrote the song."}};
  inst.label = Label::SUP;
  GazetteerRecognizer ner(Gazetteer{{"Reg Presley"}, {}, {}});
  const EntitySet causal = collect_causal_entities(
      inst, HeuristicExtractor().extract(inst), ner);
  CounterRng rng(9);
  CHECK_THROWS_AS(plan_edits(causal, EntityPools{}, rng), NoEditPossibleError);
}

TEST_CASE("two persons in the same evidence item cannot swap") {
  Instance inst;
  inst.id = "t6";
  inst.claim = "Reg Presley met Mike Newell.";
  inst.evidence = {{"", "Reg Presley met Mike Newell on set."}};
  inst.label = Label::SUP;
  GazetteerRecognizer ner(Gazetteer{{"Reg Presley", "Mike Newell"}, {}, {}});
  const EntitySet causal = collect_causal_entities(
      inst, HeuristicExtractor().extract(inst), ner);
  CounterRng rng(2);
  CHECK_THROWS_AS(plan_edits(causal, EntityPools{}, rng), NoEditPossibleError);
}

TEST_CASE("replacement rewrites every occurrence in texts and titles") {
  const Instance inst = table_one_instance();
  const GazetteerRecognizer ner = table_one_recognizer();
  const EntitySet causal = collect_causal_entities(
      inst, HeuristicExtractor().extract(inst), ner);

  EditPlan plan;
  plan.ops.push_back(ReplaceOp{EntityType::DATE, "2006", "2008"});
  const EditResult edited = apply_edits(inst.evidence, causal, plan);

  CHECK(evidence_occurrences(edited.evidence, "2006") == 0);
  CHECK(evidence_occurrences(edited.evidence, "2008") ==
        evidence_occurrences(inst.evidence, "2006"));
  // non-entity text is untouched
  CHECK(edited.evidence[1].text == inst.evidence[1].text);
}

TEST_CASE("swap exchanges titles and bodies simultaneously") {
  Instance inst;
  inst.id = "t7";
  inst.claim = "Reg Presley wrote the song and Mike Newell directed.";
  inst.evidence = {{"Reg Presley", "Reg Presley wrote the song."},
                   {"Mike Newell", "The film by Mike Newell starred nobody."}};
  inst.label = Label::SUP;
  GazetteerRecognizer ner(Gazetteer{{"Reg Presley", "Mike Newell"}, {}, {}});
  const EntitySet causal = collect_causal_entities(
      inst, HeuristicExtractor().extract(inst), ner);

  EditPlan plan;
  plan.ops.push_back(SwapOp{"Reg Presley", "Mike Newell"});
  const EditResult edited = apply_edits(inst.evidence, causal, plan);

  CHECK(edited.evidence[0].title == "Mike Newell");
  CHECK(edited.evidence[0].text == "Mike Newell wrote the song.");
  CHECK(edited.evidence[1].title == "Reg Presley");
  CHECK(edited.evidence[1].text == "The film by Reg Presley starred nobody.");

  // T' mirrors T with surfaces exchanged and valid spans
  for (const Entity& e : edited.entities) {
    const std::string& text = edited.evidence[e.evidence_index].text;
    CHECK(text.substr(e.span.start, e.span.end - e.span.start) == e.surface);
  }
}

TEST_CASE("vacuous rewrite leaves evidence and entities unchanged") {
  const Instance inst = table_one_instance();
  const EntitySet causal = collect_causal_entities(
      inst, HeuristicExtractor().extract(inst), table_one_recognizer());
  EditPlan plan;
  plan.ops.push_back(ReplaceOp{EntityType::GPE, "Nowhere City", "Somewhere"});
  const EditResult edited = apply_edits(inst.evidence, causal, plan);
  CHECK(edited.evidence == inst.evidence);
  CHECK(edited.entities == causal);
}

TEST_CASE("malformed plans are rejected") {
  const Instance inst = table_one_instance();
  const EntitySet causal = collect_causal_entities(
      inst, HeuristicExtractor().extract(inst), table_one_recognizer());

  EditPlan twice;
  twice.ops.push_back(ReplaceOp{EntityType::DATE, "2006", "2007"});
  twice.ops.push_back(ReplaceOp{EntityType::DATE, "2006", "2009"});
  CHECK_THROWS_AS(apply_edits(inst.evidence, causal, twice), ValidationError);

  EditPlan self_swap;
  self_swap.ops.push_back(SwapOp{"Ford Fusion", "Ford Fusion"});
  CHECK_THROWS_AS(apply_edits(inst.evidence, causal, self_swap), ValidationError);

  EditPlan identity;
  identity.ops.push_back(ReplaceOp{EntityType::DATE, "2006", "2006"});
  CHECK_THROWS_AS(apply_edits(inst.evidence, causal, identity), ValidationError);
}

TEST_CASE("overlapping surfaces rewrite longest-first") {
  Instance inst;
  inst.id = "t8";
  inst.claim = "Ford and Ford Fusion.";
  inst.evidence = {{"", "Ford made the Ford Fusion in Ford plants."}};
  inst.label = Label::SUP;
  EntitySet causal;  // plan validity does not depend on T

  EditPlan plan;
  plan.ops.push_back(ReplaceOp{EntityType::ORG, "Ford Fusion", "Atlas Nine"});
  plan.ops.push_back(ReplaceOp{EntityType::ORG, "Ford", "Vesta"});
  const EditResult edited = apply_edits(inst.evidence, causal, plan);
  CHECK(edited.evidence[0].text == "Vesta made the Atlas Nine in Vesta plants.");
}

TEST_CASE("consistency property over randomized edits") {
  CounterRng rng(0xed17);
  const std::vector<std::string> words = {"alpha", "beta",  "gamma", "delta",
                                          "omega", "sigma", "kappa", "zeta"};
  for (int trial = 0; trial < 300; ++trial) {
    // surfaces are distinct single words, so no substring interactions
    std::vector<std::string> surfaces = words;
    for (std::size_t i = surfaces.size(); i-- > 1;)
      std::swap(surfaces[i], surfaces[rng.uniform(i + 1)]);

    Evidence evidence;
    const std::size_t n_items = 2 + rng.uniform(3);
    for (std::size_t i = 0; i < n_items; ++i) {
      std::string text = "filler";
      const std::size_t n_words = 3 + rng.uniform(6);
      for (std::size_t w = 0; w < n_words; ++w)
        text += " " + words[rng.uniform(words.size())];
      evidence.push_back({words[rng.uniform(words.size())], text + "."});
    }

    EditPlan plan;
    plan.ops.push_back(ReplaceOp{EntityType::GPE, surfaces[0], surfaces[1]});
    plan.ops.push_back(SwapOp{surfaces[2], surfaces[3]});

    const std::size_t before_old = evidence_occurrences(evidence, surfaces[0]);
    const std::size_t before_a = evidence_occurrences(evidence, surfaces[2]);
    const std::size_t before_b = evidence_occurrences(evidence, surfaces[3]);

    const EditResult edited = apply_edits(evidence, EntitySet{}, plan);
    CHECK(evidence_occurrences(edited.evidence, surfaces[0]) == 0);
    CHECK(evidence_occurrences(edited.evidence, surfaces[2]) == before_b);
    CHECK(evidence_occurrences(edited.evidence, surfaces[3]) == before_a);
    // replacement target inherits the old occurrences
    CHECK(evidence_occurrences(edited.evidence, surfaces[1]) >= before_old);
  }
}

TEST_CASE("plans are deterministic for a fixed seed") {
  const Instance inst = table_one_instance();
  const GazetteerRecognizer ner = table_one_recognizer();
  const EntitySet causal = collect_causal_entities(
      inst, HeuristicExtractor().extract(inst), ner);
  EntityPools pools;
  pools.date = {"1881", "1997", "2006", "2031"};

  CounterRng rng_a(1234), rng_b(1234);
  const EditPlan plan_a = plan_edits(causal, pools, rng_a);
  const EditPlan plan_b = plan_edits(causal, pools, rng_b);
  REQUIRE(plan_a.ops.size() == plan_b.ops.size());
  for (std::size_t i = 0; i < plan_a.ops.size(); ++i)
    CHECK(describe(plan_a.ops[i]) == describe(plan_b.ops[i]));

  const EditResult e1 = apply_edits(inst.evidence, causal, plan_a);
  const EditResult e2 = apply_edits(inst.evidence, causal, plan_b);
  CHECK(e1.evidence == e2.evidence);
  CHECK(e1.entities == e2.entities);
}
