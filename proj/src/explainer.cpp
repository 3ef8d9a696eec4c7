#include "cfgen/explainer.hpp"

#include <map>

#include "cfgen/errors.hpp"
#include "cfgen/tokenizer.hpp"

namespace cfgen {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kStopwords = {
      "a",     "an",    "the",   "is",    "was",   "are",   "were",  "be",
      "been",  "being", "of",    "in",    "on",    "at",    "to",    "for",
      "with",  "by",    "from",  "and",   "or",    "but",   "not",   "no",
      "as",    "that",  "this",  "these", "those", "it",    "its",   "he",
      "she",   "his",   "her",   "him",   "they",  "them",  "their", "we",
      "you",   "i",     "has",   "have",  "had",   "do",    "does",  "did",
      "will",  "would", "can",   "could", "than",  "then",  "there", "here",
      "also",  "who",   "whom",  "which", "what",  "when",  "where", "while",
      "into",  "over",  "under", "about", "after", "before", "s",    "t"};
  return kStopwords;
}

namespace {

bool is_content_word(const std::string& lower_token) {
  if (lower_token.empty() || is_punctuation_token(lower_token)) return false;
  return stopwords().count(lower_token) == 0;
}

}  // namespace

std::set<std::string> content_words(const std::string& text) {
  std::set<std::string> out;
  for (const auto& token : tokenize_words(text)) {
    std::string lower = to_lower(token);
    if (is_content_word(lower)) out.insert(std::move(lower));
  }
  return out;
}

Rationales HeuristicExtractor::extract(const Instance& inst) const {
  validate_instance(inst);

  const std::set<std::string> claim_words = content_words(inst.claim);

  // Content words shared by >= 2 evidence items bridge the hops.
  std::vector<std::set<std::string>> evidence_words;
  evidence_words.reserve(inst.evidence.size());
  for (const auto& item : inst.evidence)
    evidence_words.push_back(content_words(item.text));

  std::map<std::string, int> owners;
  for (const auto& words : evidence_words) {
    for (const auto& w : words) ++owners[w];
  }
  std::set<std::string> bridge_words;
  for (const auto& [word, count] : owners) {
    if (count >= 2) bridge_words.insert(word);
  }

  Rationales rats;
  rats.sentence_mask.resize(inst.evidence.size(), false);
  rats.token_spans.resize(inst.evidence.size());
  for (std::size_t i = 0; i < inst.evidence.size(); ++i) {
    for (const RawToken& token : tokenize_raw(inst.evidence[i].text)) {
      std::string lower = to_lower(token.text);
      if (!is_content_word(lower)) continue;
      if (claim_words.count(lower) > 0 || bridge_words.count(lower) > 0) {
        rats.token_spans[i].push_back(Span{token.start, token.end});
      }
    }
    rats.sentence_mask[i] = !rats.token_spans[i].empty();
  }

  bool any = false;
  for (bool m : rats.sentence_mask) any = any || m;
  if (!any)
    throw EmptyRationaleError("no sentence qualifies for instance " + inst.id);
  return rats;
}

Rationales OracleExtractor::extract(const Instance& inst) const {
  validate_instance(inst);
  if (!inst.gold_rationales)
    throw EmptyRationaleError("no gold rationales attached to instance " +
                              inst.id);
  bool any = false;
  for (bool m : inst.gold_rationales->sentence_mask) any = any || m;
  if (!any)
    throw EmptyRationaleError("gold rationales mask no sentence for " +
                              inst.id);
  return *inst.gold_rationales;
}

}  // namespace cfgen
