#include "cfgen/tokenizer.hpp"

#include <cctype>

namespace cfgen {

namespace {

bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

bool is_punct_byte(unsigned char c) {
  // ASCII punctuation only; multi-byte UTF-8 sequences stay inside words.
  return c < 0x80 && std::ispunct(c) != 0;
}

}  // namespace

std::vector<RawToken> tokenize_raw(const std::string& text) {
  std::vector<RawToken> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      ++i;
      continue;
    }
    if (is_punct_byte(c)) {
      out.push_back({std::string(1, text[i]), i, i + 1});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < n && !is_space_byte(static_cast<unsigned char>(text[i])) &&
           !is_punct_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    out.push_back({text.substr(start, i - start), start, i});
  }
  return out;
}

std::vector<std::string> tokenize_words(const std::string& text) {
  std::vector<std::string> out;
  for (auto& t : tokenize_raw(text)) out.push_back(std::move(t.text));
  return out;
}

std::string to_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_punctuation_token(const std::string& token) {
  return token.size() == 1 &&
         is_punct_byte(static_cast<unsigned char>(token[0]));
}

}  // namespace cfgen
