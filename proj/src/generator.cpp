#include "cfgen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "cfgen/errors.hpp"

namespace cfgen {

std::size_t Hypothesis::satisfied_count() const {
  std::size_t n = 0;
  for (bool s : satisfied) n += s ? 1 : 0;
  return n;
}

ConstraintSet build_constraints(const EntitySet& entities,
                                const TokenScorer& scorer) {
  if (entities.empty())
    throw EmptyConstraintsError("build_constraints: empty entity set");

  std::map<std::size_t, std::vector<std::vector<TokenId>>> by_evidence;
  std::map<std::size_t, std::set<std::vector<TokenId>>> seen;
  for (const Entity& e : entities.entities) {
    std::vector<TokenId> phrase = scorer.vocab().tokenize(e.surface);
    if (phrase.empty()) continue;
    if (seen[e.evidence_index].insert(phrase).second)
      by_evidence[e.evidence_index].push_back(std::move(phrase));
  }
  if (by_evidence.empty())
    throw EmptyConstraintsError(
        "no entity tokenizes to a non-empty constraint phrase");

  ConstraintSet cons;
  for (auto& [index, phrases] : by_evidence)
    cons.groups.push_back(DisjunctiveGroup{index, std::move(phrases)});
  return cons;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool ends_with(const std::vector<TokenId>& tokens,
               const std::vector<TokenId>& phrase, std::size_t phrase_len) {
  if (tokens.size() < phrase_len) return false;
  for (std::size_t i = 0; i < phrase_len; ++i) {
    if (tokens[tokens.size() - phrase_len + i] != phrase[i]) return false;
  }
  return true;
}

// log_prob descending, then token sequence ascending.
bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.tokens < b.tokens;
}

void validate_config(const ConstraintSet& cons, const GeneratorConfig& cfg) {
  if (cfg.beam_size < cons.size() + 1)
    throw ValidationError("beam_size must be at least group count + 1");
  if (cfg.k > cfg.beam_size)
    throw ValidationError("k must not exceed beam_size");
  std::size_t longest = 0;
  for (const auto& g : cons.groups) {
    for (const auto& p : g.phrases) longest = std::max(longest, p.size());
  }
  if (cfg.max_length < longest)
    throw ValidationError("max_length shorter than a constraint phrase");
  if (cfg.max_length == 0) throw ValidationError("max_length must be positive");
}

// Appends `token` to `parent`, updating satisfaction from the new tail and
// recording the longest still-open partial phrase match.
Hypothesis extend(const Hypothesis& parent, TokenId token, double token_lp,
                  const ConstraintSet& cons) {
  Hypothesis h;
  h.tokens = parent.tokens;
  h.tokens.push_back(token);
  h.log_prob = parent.log_prob + token_lp;
  h.satisfied = parent.satisfied;
  for (std::size_t g = 0; g < cons.groups.size(); ++g) {
    if (h.satisfied[g]) continue;
    for (const auto& phrase : cons.groups[g].phrases) {
      if (ends_with(h.tokens, phrase, phrase.size())) {
        h.satisfied[g] = true;
        break;
      }
    }
  }
  for (std::size_t g = 0; g < cons.groups.size(); ++g) {
    if (h.satisfied[g]) continue;
    for (std::size_t p = 0; p < cons.groups[g].phrases.size(); ++p) {
      const auto& phrase = cons.groups[g].phrases[p];
      for (std::size_t len = phrase.size() - 1; len >= 1; --len) {
        if (ends_with(h.tokens, phrase, len)) {
          if (!h.phrase_progress || h.phrase_progress->position < len)
            h.phrase_progress = Hypothesis::PhraseProgress{g, p, len};
          break;
        }
      }
    }
  }
  return h;
}

}  // namespace

std::vector<Hypothesis> constrained_beam_search(const TokenScorer& scorer,
                                                const std::string& input,
                                                const ConstraintSet& cons,
                                                const GeneratorConfig& cfg) {
  validate_config(cons, cfg);
  const Vocabulary& vocab = scorer.vocab();
  const std::vector<TokenId> context = vocab.tokenize(input);
  const std::size_t n_groups = cons.size();

  Hypothesis root;
  root.satisfied.resize(n_groups, false);
  std::vector<Hypothesis> live = {std::move(root)};
  std::vector<Hypothesis> finished;

  std::vector<std::size_t> order(vocab.size());
  while (!live.empty()) {
    std::vector<Hypothesis> pool;
    for (const Hypothesis& parent : live) {
      const std::vector<double> scores =
          score_next_tokens(scorer, context, parent.tokens);

      // Candidate next tokens: ordinary top tokens, forced phrase starts,
      // and forced continuations of any partially emitted phrase.
      std::vector<bool> proposed(vocab.size(), false);
      for (std::size_t t = 0; t < vocab.size(); ++t) order[t] = t;
      std::sort(order.begin(), order.end(),
                [&scores](std::size_t a, std::size_t b) {
                  if (scores[a] != scores[b]) return scores[a] > scores[b];
                  return a < b;
                });
      std::size_t taken = 0;
      for (std::size_t t : order) {
        if (taken == cfg.beam_size) break;
        if (scores[t] == kNegInf) break;
        proposed[t] = true;
        ++taken;
      }
      for (std::size_t g = 0; g < n_groups; ++g) {
        if (parent.satisfied[g]) continue;
        for (const auto& phrase : cons.groups[g].phrases) {
          proposed[phrase[0]] = true;
          for (std::size_t len = phrase.size() - 1; len >= 1; --len) {
            if (ends_with(parent.tokens, phrase, len)) proposed[phrase[len]] = true;
          }
        }
      }

      for (TokenId t = 0; t < proposed.size(); ++t) {
        if (!proposed[t] || scores[t] == kNegInf) continue;
        if (t == Vocabulary::kBegin) continue;
        Hypothesis child = extend(parent, t, scores[t], cons);
        if (t == Vocabulary::kEnd) {
          if (child.satisfied_count() == n_groups)
            finished.push_back(std::move(child));
          continue;  // unsatisfied finishes die
        }
        if (child.tokens.size() >= cfg.max_length) continue;  // no room to end
        pool.push_back(std::move(child));
      }
    }

    // Bank-partitioned beam: floor(beam/(n+1)) slots per satisfied-count
    // bank, remainder and unfilled slots flowing to the fullest banks.
    std::vector<std::vector<Hypothesis>> banks(n_groups + 1);
    for (Hypothesis& h : pool)
      banks[h.satisfied_count()].push_back(std::move(h));
    for (auto& bank : banks) std::sort(bank.begin(), bank.end(), better);

    const std::size_t quota = cfg.beam_size / (n_groups + 1);
    std::vector<std::size_t> take(n_groups + 1, 0);
    std::size_t total = 0;
    for (std::size_t b = 0; b <= n_groups; ++b) {
      take[b] = std::min(quota, banks[b].size());
      total += take[b];
    }
    std::size_t leftover = cfg.beam_size - total;
    for (std::size_t b = n_groups + 1; b-- > 0 && leftover > 0;) {
      std::size_t extra = std::min(leftover, banks[b].size() - take[b]);
      take[b] += extra;
      leftover -= extra;
    }

    live.clear();
    for (std::size_t b = 0; b <= n_groups; ++b) {
      for (std::size_t i = 0; i < take[b]; ++i)
        live.push_back(std::move(banks[b][i]));
    }
  }

  if (finished.empty())
    throw NoSatisfyingHypothesisError(
        "no hypothesis satisfies all groups within max_length");
  std::sort(finished.begin(), finished.end(), better);
  return finished;
}

std::string rationale_input_text(const Rationales& rats,
                                 const Evidence& evidence) {
  if (rats.sentence_mask.size() != evidence.size())
    throw ValidationError("rationales do not match evidence length");
  std::string input;
  for (std::size_t i = 0; i < evidence.size(); ++i) {
    if (!rats.sentence_mask[i]) continue;
    if (!input.empty()) input += ' ';
    input += evidence[i].text;
  }
  return input;
}

GeneratedCandidates generate_candidates(const Rationales& rats,
                                        const Evidence& evidence,
                                        const EntitySet& entities,
                                        const TokenScorer& scorer,
                                        const GeneratorConfig& cfg) {
  const std::string input = rationale_input_text(rats, evidence);
  if (input.empty())
    throw EmptyRationaleError("no masked sentence to generate from");

  const ConstraintSet cons = build_constraints(entities, scorer);
  const std::vector<Hypothesis> ranked =
      constrained_beam_search(scorer, input, cons, cfg);

  GeneratedCandidates out;
  std::set<std::string> seen;
  for (const Hypothesis& h : ranked) {
    if (out.claims.size() == cfg.k) break;
    std::string claim = scorer.vocab().detokenize(h.tokens);
    if (claim.empty()) continue;
    if (seen.insert(claim).second) out.claims.push_back(std::move(claim));
  }
  out.shortfall = cfg.k - out.claims.size();
  return out;
}

}  // namespace cfgen
