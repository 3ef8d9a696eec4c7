#include "cfgen/toy_backends.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "cfgen/errors.hpp"
#include "cfgen/rng.hpp"
#include "cfgen/tokenizer.hpp"

namespace cfgen {

namespace {

std::vector<double> to_log(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out[i] = weights[i] > 0.0 ? std::log(weights[i] / total)
                              : -std::numeric_limits<double>::infinity();
  }
  return out;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

}  // namespace

std::vector<double> UniformScorer::score_next_tokens(
    const std::vector<TokenId>&, const std::vector<TokenId>&) const {
  return std::vector<double>(vocab_.size(),
                             std::log(1.0 / static_cast<double>(vocab_.size())));
}

BigramScorer::BigramScorer(Vocabulary vocab,
                           const std::vector<std::string>& texts, double alpha,
                           double context_boost)
    : vocab_(std::move(vocab)),
      alpha_(alpha),
      context_boost_(context_boost),
      counts_(vocab_.size(), std::vector<std::uint32_t>(vocab_.size(), 0)),
      totals_(vocab_.size(), 0) {
  for (const auto& text : texts) {
    std::vector<TokenId> ids = vocab_.tokenize(text);
    TokenId prev = Vocabulary::kBegin;
    for (TokenId id : ids) {
      ++counts_[prev][id];
      ++totals_[prev];
      prev = id;
    }
    ++counts_[prev][Vocabulary::kEnd];
    ++totals_[prev];
  }
}

std::vector<double> BigramScorer::score_next_tokens(
    const std::vector<TokenId>& context,
    const std::vector<TokenId>& prefix) const {
  const TokenId prev = prefix.empty() ? Vocabulary::kBegin : prefix.back();
  const std::size_t v = vocab_.size();
  std::vector<double> weights(v, 0.0);
  if (totals_[prev] == 0 && alpha_ == 0.0) {
    std::fill(weights.begin(), weights.end(), 1.0);
  } else {
    for (std::size_t t = 0; t < v; ++t) {
      weights[t] = static_cast<double>(counts_[prev][t]) + alpha_;
    }
  }
  if (context_boost_ != 1.0 && !context.empty()) {
    std::vector<bool> in_context(v, false);
    for (TokenId id : context) in_context[id] = true;
    for (std::size_t t = 0; t < v; ++t) {
      if (in_context[t]) weights[t] *= context_boost_;
    }
  }
  return to_log(weights);
}

std::vector<double> RandomScorer::score_next_tokens(
    const std::vector<TokenId>& context,
    const std::vector<TokenId>& prefix) const {
  const TokenId prev = prefix.empty() ? Vocabulary::kBegin : prefix.back();
  std::uint64_t ctx_hash = 0xcbf29ce484222325ULL;
  for (TokenId id : context) {
    ctx_hash ^= id;
    ctx_hash *= 0x100000001b3ULL;
  }
  const std::size_t v = vocab_.size();
  std::vector<double> weights(v);
  for (std::size_t t = 0; t < v; ++t) {
    std::uint64_t h =
        mix64(seed_ ^ ctx_hash ^ (static_cast<std::uint64_t>(prev) << 32 | t));
    weights[t] = 0.05 + static_cast<double>(h >> 11) * 0x1.0p-53;
  }
  return to_log(weights);
}

std::vector<std::vector<double>> HashEmbedder::embed(
    const std::string& text) const {
  std::vector<std::vector<double>> out;
  for (const auto& token : tokenize_words(text)) {
    std::vector<double> vec(dimension_);
    std::uint64_t token_hash = fnv1a(token);
    for (std::size_t j = 0; j < dimension_; ++j) {
      std::uint64_t h = mix64(seed_ ^ token_hash ^ (0x51ed2701ULL * (j + 1)));
      vec[j] = 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
    }
    out.push_back(std::move(vec));
  }
  return out;
}

std::vector<std::vector<double>> FixedEmbedder::embed(
    const std::string& text) const {
  std::vector<std::vector<double>> out;
  for (const auto& token : tokenize_words(text)) {
    auto it = table_.find(token);
    if (it == table_.end())
      throw Error("FixedEmbedder has no vector for token '" + token + "'");
    out.push_back(it->second);
  }
  return out;
}

GazetteerRecognizer::GazetteerRecognizer(Gazetteer gazetteer) {
  auto add = [this](const std::vector<std::string>& names, EntityType etype) {
    for (const auto& name : names) {
      auto tokens = tokenize_words(name);
      if (tokens.empty()) continue;
      phrases_[tokens[0]].push_back({std::move(tokens), etype});
    }
  };
  add(gazetteer.persons, EntityType::PERSON);
  add(gazetteer.orgs, EntityType::ORG);
  add(gazetteer.gpes, EntityType::GPE);
  for (auto& [first, entries] : phrases_) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const PhraseEntry& a, const PhraseEntry& b) {
                       return a.tokens.size() > b.tokens.size();
                     });
  }
}

std::vector<Entity> GazetteerRecognizer::recognize(
    const std::string& text) const {
  std::vector<Entity> out;
  const std::vector<RawToken> tokens = tokenize_raw(text);
  std::size_t i = 0;
  while (i < tokens.size()) {
    auto it = phrases_.find(tokens[i].text);
    if (it != phrases_.end()) {
      const PhraseEntry* hit = nullptr;
      for (const auto& entry : it->second) {
        if (i + entry.tokens.size() > tokens.size()) continue;
        bool match = true;
        for (std::size_t k = 1; k < entry.tokens.size(); ++k) {
          if (tokens[i + k].text != entry.tokens[k]) {
            match = false;
            break;
          }
        }
        if (match) {
          hit = &entry;
          break;  // entries are longest-first
        }
      }
      if (hit != nullptr) {
        const std::size_t start = tokens[i].start;
        const std::size_t end = tokens[i + hit->tokens.size() - 1].end;
        out.push_back(Entity{text.substr(start, end - start), hit->etype, 0,
                             Span{start, end}});
        i += hit->tokens.size();
        continue;
      }
    }
    if (all_digits(tokens[i].text)) {
      EntityType etype =
          tokens[i].text.size() == 4 ? EntityType::DATE : EntityType::NUM;
      out.push_back(Entity{tokens[i].text, etype, 0,
                           Span{tokens[i].start, tokens[i].end}});
    }
    ++i;
  }
  return out;
}

VerifyResult EntityOverlapVerifier::verify(const std::string& claim,
                                           const Evidence& evidence) const {
  if (claim.empty()) throw EmptyInputError("verify: empty claim");
  if (evidence.empty()) throw EmptyInputError("verify: empty evidence");

  std::set<std::string> seen;
  std::vector<std::string> surfaces;
  for (const Entity& e : ner_->recognize(claim)) {
    if (seen.insert(to_lower(e.surface)).second) surfaces.push_back(e.surface);
  }

  std::size_t present = 0;
  for (const auto& surface : surfaces) {
    bool found = false;
    for (const auto& item : evidence) {
      if (item.text.find(surface) != std::string::npos ||
          item.title.find(surface) != std::string::npos) {
        found = true;
        break;
      }
    }
    if (found) ++present;
  }

  Label label;
  if (surfaces.empty() || present == surfaces.size()) {
    label = Label::SUP;
  } else if (2 * present >= surfaces.size()) {
    label = Label::REF;
  } else {
    label = Label::NEI;
  }

  VerifyResult result;
  result.label = label;
  for (Label y : {Label::SUP, Label::REF, Label::NEI}) {
    result.scores[y] = (y == label) ? 0.6 : 0.2;
  }
  return result;
}

Gazetteer default_gazetteer() {
  return Gazetteer{
      // persons
      {"Patrick Carpentier", "Reg Presley", "Mike Newell", "Alice Moreau",
       "Daniel Reyes", "Mira Chen", "Tomas Berg", "Lena Fischer",
       "Omar Haddad", "Sara Lindqvist", "Victor Crane", "Nina Petrova",
       "Charlotte Coleman", "Bruce Geller", "Joan Redwood", "Paulo Mendes",
       "Elena Vasquez", "Harold Finch"},
      // orgs
      {"Ford Fusion", "Silver Arrow Racing", "Northgate Studios",
       "Harbor Lights Ensemble", "Kestrel Books", "Atlas Film Works",
       "Meridian Observatory", "Blue Finch Records", "The Troggs",
       "Riverbend Institute", "Cascade Pictures", "Ivory Gate Press"},
      // gpes
      {"Arizona", "Texas", "Ontario", "Lisbon", "Kyoto", "Norway", "Baltimore",
       "Stuttgart", "Helsinki", "Adelaide"}};
}

}  // namespace cfgen
