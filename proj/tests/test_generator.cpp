#include <doctest.h>

#include <set>

#include "cfgen/errors.hpp"
#include "cfgen/generator.hpp"
#include "cfgen/rng.hpp"
#include "cfgen/toy_backends.hpp"
#include "test_support.hpp"

using namespace cfgen;
using namespace cfgen::test;

namespace {

EntitySet entity_at(const Evidence& evidence,
                    const std::vector<std::pair<std::size_t, std::string>>& specs) {
  std::vector<Entity> entities;
  for (const auto& [index, surface] : specs) {
    const std::size_t pos = evidence[index].text.find(surface);
    REQUIRE(pos != std::string::npos);
    entities.push_back(Entity{surface, EntityType::ORG, index,
                              Span{pos, pos + surface.size()}});
  }
  return make_entity_set(std::move(entities), evidence);
}

}  // namespace

TEST_CASE("build_constraints groups phrases by owning evidence") {
  const Evidence evidence = {
      {"", "Ford Fusion introduced for the 2006 model year."},
      {"", "Patrick Carpentier drives the Ford Fusion."},
      {"", "The 1997 rookie was Patrick Carpentier."}};
  Vocabulary vocab = Vocabulary::from_texts(
      {evidence[0].text, evidence[1].text, evidence[2].text});
  UniformScorer scorer(vocab);

  std::vector<Entity> raw;
  auto add = [&](std::size_t i, const std::string& s) {
    const std::size_t pos = evidence[i].text.find(s);
    raw.push_back(Entity{s, EntityType::ORG, i, Span{pos, pos + s.size()}});
  };
  add(0, "Ford Fusion");
  add(0, "2006");
  add(1, "Patrick Carpentier");
  add(1, "Ford Fusion");
  add(2, "1997");
  add(2, "Patrick Carpentier");

  const ConstraintSet cons =
      build_constraints(make_entity_set(raw, evidence), scorer);
  REQUIRE(cons.size() == 3);
  CHECK(cons.groups[0].evidence_index == 0);
  CHECK(cons.groups[0].phrases.size() == 2);
  CHECK(cons.groups[1].phrases.size() == 2);
  CHECK(cons.groups[2].phrases.size() == 2);
}

TEST_CASE("single entity gives a degenerate one-phrase conjunction") {
  const Evidence evidence = {{"", "only Arizona here."}};
  Vocabulary vocab = Vocabulary::from_texts({evidence[0].text});
  UniformScorer scorer(vocab);
  const ConstraintSet cons =
      build_constraints(entity_at(evidence, {{0, "Arizona"}}), scorer);
  REQUIRE(cons.size() == 1);
  REQUIRE(cons.groups[0].phrases.size() == 1);
  CHECK(cons.groups[0].phrases[0] == vocab.tokenize("Arizona"));
}

TEST_CASE("evidence items without entities contribute no group") {
  const Evidence evidence = {{"", "nothing here."},
                             {"", "Arizona is here."},
                             {"", "nothing again."}};
  Vocabulary vocab = Vocabulary::from_texts(
      {evidence[0].text, evidence[1].text, evidence[2].text});
  UniformScorer scorer(vocab);
  const ConstraintSet cons =
      build_constraints(entity_at(evidence, {{1, "Arizona"}}), scorer);
  REQUIRE(cons.size() == 1);
  CHECK(cons.groups[0].evidence_index == 1);
}

TEST_CASE("an empty entity set cannot build constraints") {
  Vocabulary vocab({"a"});
  UniformScorer scorer(vocab);
  CHECK_THROWS_AS(build_constraints(EntitySet{}, scorer), EmptyConstraintsError);
}

TEST_CASE("a single forced phrase appears in every output") {
  Vocabulary vocab({"a", "b"});
  UniformScorer scorer(vocab);
  ConstraintSet cons;
  cons.groups.push_back({0, {vocab.tokenize("b")}});
  GeneratorConfig cfg{8, 3, 4};

  const auto finished = constrained_beam_search(scorer, "a", cons, cfg);
  REQUIRE(!finished.empty());
  for (const Hypothesis& h : finished) {
    CHECK(contains_phrase(h.tokens, vocab.tokenize("b")));
    CHECK(h.tokens.back() == Vocabulary::kEnd);
    CHECK(h.tokens.size() <= cfg.max_length);
  }
}

TEST_CASE("a two-group conjunction forces both tokens") {
  Vocabulary vocab({"a", "b"});
  UniformScorer scorer(vocab);
  ConstraintSet cons;
  cons.groups.push_back({0, {vocab.tokenize("a")}});
  cons.groups.push_back({1, {vocab.tokenize("b")}});
  GeneratorConfig cfg{8, 4, 4};

  const auto finished = constrained_beam_search(scorer, "a b", cons, cfg);
  REQUIRE(!finished.empty());
  for (const Hypothesis& h : finished) {
    CHECK(contains_phrase(h.tokens, vocab.tokenize("a")));
    CHECK(contains_phrase(h.tokens, vocab.tokenize("b")));
  }
}

TEST_CASE("full-width beam matches the brute-force enumeration argmax") {
  CounterRng rng(0xbeef01);
  int solved = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t words = 2 + rng.uniform(3);  // vocab size 4..6
    Vocabulary vocab = small_vocab(words);
    RandomScorer scorer(vocab, rng.next());
    const ConstraintSet cons = random_constraints(rng, vocab, 2, 2, 2);
    const std::size_t max_length = 4 + rng.uniform(3);  // 4..6

    std::size_t longest = 0;
    for (const auto& g : cons.groups)
      for (const auto& p : g.phrases) longest = std::max(longest, p.size());
    if (longest > max_length) continue;

    GeneratorConfig cfg{4096, max_length, 1};
    const EnumeratedBest best = enumerate_best(scorer, "w0", cons, max_length);
    if (!best.found) {
      CHECK_THROWS_AS(constrained_beam_search(scorer, "w0", cons, cfg),
                      NoSatisfyingHypothesisError);
      continue;
    }
    const auto finished = constrained_beam_search(scorer, "w0", cons, cfg);
    REQUIRE(!finished.empty());
    CHECK(finished[0].log_prob == doctest::Approx(best.log_prob).epsilon(1e-9));
    CHECK(finished[0].tokens == best.tokens);
    ++solved;
  }
  CHECK(solved > 10);
}

TEST_CASE("empty constraints reduce to plain beam search token-for-token") {
  CounterRng rng(0x5eaf);
  for (int trial = 0; trial < 30; ++trial) {
    Vocabulary vocab = small_vocab(2 + rng.uniform(5));
    RandomScorer scorer(vocab, rng.next());
    const std::size_t beam = 2 + rng.uniform(6);
    const std::size_t max_length = 3 + rng.uniform(5);
    GeneratorConfig cfg{beam, max_length, 1};

    const auto plain = plain_beam_search(scorer, "w0 w1", beam, max_length);
    std::vector<Hypothesis> constrained;
    try {
      constrained =
          constrained_beam_search(scorer, "w0 w1", ConstraintSet{}, cfg);
    } catch (const NoSatisfyingHypothesisError&) {
      // nothing finished; the plain search must agree
      CHECK(plain.empty());
      continue;
    }
    REQUIRE(constrained.size() == plain.size());
    for (std::size_t i = 0; i < plain.size(); ++i) {
      CHECK(constrained[i].tokens == plain[i].tokens);
      CHECK(constrained[i].log_prob ==
            doctest::Approx(plain[i].log_prob).epsilon(1e-12));
    }
  }
}

TEST_CASE("satisfaction is sound over randomized scorers and constraints") {
  CounterRng rng(0x50f7);
  std::size_t returned = 0;
  for (int trial = 0; trial < 120; ++trial) {
    Vocabulary vocab = small_vocab(3 + rng.uniform(7));
    RandomScorer scorer(vocab, rng.next());
    const ConstraintSet cons = random_constraints(rng, vocab, 3, 3, 3);
    std::size_t longest = 0;
    for (const auto& g : cons.groups)
      for (const auto& p : g.phrases) longest = std::max(longest, p.size());
    const std::size_t max_length = std::max<std::size_t>(longest, 6) + 4;
    GeneratorConfig cfg{cons.size() + 4 + rng.uniform(8), max_length,
                        1};
    try {
      for (const Hypothesis& h :
           constrained_beam_search(scorer, "w0", cons, cfg)) {
        CHECK(satisfies_all_groups(h.tokens, cons));
        // stored satisfaction flags agree with a from-scratch recomputation
        for (std::size_t g = 0; g < cons.groups.size(); ++g) {
          bool recomputed = false;
          for (const auto& p : cons.groups[g].phrases)
            recomputed = recomputed || contains_phrase(h.tokens, p);
          CHECK(h.satisfied[g] == recomputed);
        }
        ++returned;
      }
    } catch (const NoSatisfyingHypothesisError&) {
    }
  }
  CHECK(returned > 200);
}

TEST_CASE("search is deterministic") {
  Vocabulary vocab = small_vocab(5);
  RandomScorer scorer(vocab, 77);
  CounterRng rng(3);
  const ConstraintSet cons = random_constraints(rng, vocab, 2, 2, 2);
  GeneratorConfig cfg{10, 8, 5};
  const auto a = constrained_beam_search(scorer, "w0", cons, cfg);
  const auto b = constrained_beam_search(scorer, "w0", cons, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tokens == b[i].tokens);
    CHECK(a[i].log_prob == b[i].log_prob);
  }
}

TEST_CASE("unreachable constraints raise NoSatisfyingHypothesisError") {
  Vocabulary vocab({"a", "b", "c"});
  // "c" never follows anything in this training text, so the forced path
  // has zero probability
  BigramScorer scorer(vocab, {"a b a b"});
  ConstraintSet cons;
  cons.groups.push_back({0, {vocab.tokenize("c")}});
  GeneratorConfig cfg{8, 6, 2};
  CHECK_THROWS_AS(constrained_beam_search(scorer, "a b", cons, cfg),
                  NoSatisfyingHypothesisError);
}

TEST_CASE("config validation pins the documented bounds") {
  Vocabulary vocab({"a", "b"});
  UniformScorer scorer(vocab);
  ConstraintSet cons;
  cons.groups.push_back({0, {vocab.tokenize("a b")}});
  cons.groups.push_back({1, {vocab.tokenize("b")}});

  CHECK_THROWS_AS(
      constrained_beam_search(scorer, "a", cons, GeneratorConfig{2, 8, 1}),
      ValidationError);  // beam < groups + 1
  CHECK_THROWS_AS(
      constrained_beam_search(scorer, "a", cons, GeneratorConfig{8, 8, 9}),
      ValidationError);  // k > beam
  CHECK_THROWS_AS(
      constrained_beam_search(scorer, "a", cons, GeneratorConfig{8, 1, 1}),
      ValidationError);  // max_length < longest phrase
}

TEST_CASE("generate_candidates returns distinct best-first claims") {
  const Evidence evidence = {{"", "red fox jumped the fence."},
                             {"", "grey owl watched the fox."}};
  Vocabulary vocab =
      Vocabulary::from_texts({evidence[0].text, evidence[1].text});
  BigramScorer scorer(vocab, {evidence[0].text, evidence[1].text}, 0.25);
  const EntitySet entities =
      entity_at(evidence, {{0, "fox"}, {1, "owl"}});

  Rationales rats;
  rats.sentence_mask = {true, true};
  rats.token_spans = {{}, {}};

  GeneratorConfig cfg{12, 10, 3};
  const GeneratedCandidates out =
      generate_candidates(rats, evidence, entities, scorer, cfg);
  CHECK(out.claims.size() + out.shortfall == cfg.k);
  CHECK(!out.claims.empty());

  std::set<std::string> unique(out.claims.begin(), out.claims.end());
  CHECK(unique.size() == out.claims.size());
  for (const std::string& claim : out.claims) {
    CHECK(claim_satisfies(claim, {{"fox"}, {"owl"}}));
  }
}

TEST_CASE("k = 1 returns exactly the top-ranked hypothesis") {
  Vocabulary vocab({"a", "b"});
  UniformScorer scorer(vocab);
  const Evidence evidence = {{"", "a b"}};
  const EntitySet entities = entity_at(evidence, {{0, "b"}});
  Rationales rats;
  rats.sentence_mask = {true};
  rats.token_spans = {{}};

  const GeneratedCandidates out = generate_candidates(
      rats, evidence, entities, scorer, GeneratorConfig{8, 3, 1});
  REQUIRE(out.claims.size() == 1);

  ConstraintSet cons;
  cons.groups.push_back({0, {vocab.tokenize("b")}});
  const auto ranked =
      constrained_beam_search(scorer, "a b", cons, GeneratorConfig{8, 3, 1});
  CHECK(out.claims[0] == vocab.detokenize(ranked[0].tokens));
}

TEST_CASE("rationale input is the in-order concatenation of masked sentences") {
  const Evidence evidence = {{"", "first."}, {"", "second."}, {"", "third."}};
  Rationales rats;
  rats.sentence_mask = {true, false, true};
  rats.token_spans = {{}, {}, {}};
  CHECK(rationale_input_text(rats, evidence) == "first. third.");
}
