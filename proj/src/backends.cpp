#include "cfgen/backends.hpp"

#include <algorithm>
#include <set>

#include "cfgen/errors.hpp"
#include "cfgen/tokenizer.hpp"

namespace cfgen {

namespace {
constexpr const char* kBeginToken = "<s>";
constexpr const char* kEndToken = "</s>";
}  // namespace

Vocabulary::Vocabulary(const std::vector<std::string>& word_tokens) {
  tokens_ = {kBeginToken, kEndToken};
  std::set<std::string> uniq(word_tokens.begin(), word_tokens.end());
  uniq.erase(kBeginToken);
  uniq.erase(kEndToken);
  tokens_.insert(tokens_.end(), uniq.begin(), uniq.end());
  for (TokenId i = 0; i < tokens_.size(); ++i) index_[tokens_[i]] = i;
}

Vocabulary Vocabulary::from_texts(const std::vector<std::string>& texts) {
  std::vector<std::string> words;
  for (const auto& t : texts) {
    auto toks = tokenize_words(t);
    words.insert(words.end(), toks.begin(), toks.end());
  }
  return Vocabulary(words);
}

TokenId Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end())
    throw UnknownTokenError("unknown token: '" + token + "'");
  return it->second;
}

std::vector<TokenId> Vocabulary::tokenize(const std::string& text) const {
  std::vector<TokenId> out;
  for (const auto& w : tokenize_words(text)) out.push_back(id(w));
  return out;
}

std::string Vocabulary::detokenize(const std::vector<TokenId>& ids) const {
  std::string out;
  for (TokenId id : ids) {
    if (id == kBegin || id == kEnd) continue;
    if (!out.empty()) out += ' ';
    out += token(id);
  }
  return out;
}

namespace {

void check_ids(const Vocabulary& vocab, const std::vector<TokenId>& ids,
               const char* what) {
  for (TokenId id : ids) {
    if (id >= vocab.size())
      throw UnknownTokenError(std::string("token id out of vocabulary in ") +
                              what + ": " + std::to_string(id));
  }
}

}  // namespace

std::vector<double> score_next_tokens(const TokenScorer& scorer,
                                      const std::vector<TokenId>& context,
                                      const std::vector<TokenId>& prefix) {
  check_ids(scorer.vocab(), context, "context");
  check_ids(scorer.vocab(), prefix, "prefix");
  return scorer.score_next_tokens(context, prefix);
}

double sequence_log_prob(const TokenScorer& scorer,
                         const std::vector<TokenId>& context,
                         const std::vector<TokenId>& tokens) {
  if (tokens.empty())
    throw EmptyInputError("sequence_log_prob requires a non-empty sequence");
  check_ids(scorer.vocab(), tokens, "tokens");
  double total = 0.0;
  std::vector<TokenId> prefix;
  prefix.reserve(tokens.size());
  for (TokenId t : tokens) {
    total += score_next_tokens(scorer, context, prefix)[t];
    prefix.push_back(t);
  }
  return total;
}

Label argmax_label(const std::map<Label, double>& scores) {
  Label best = Label::SUP;
  double best_score = -1.0;
  for (Label y : {Label::SUP, Label::REF, Label::NEI}) {
    auto it = scores.find(y);
    double s = it == scores.end() ? 0.0 : it->second;
    if (s > best_score) {
      best = y;
      best_score = s;
    }
  }
  return best;
}

}  // namespace cfgen
