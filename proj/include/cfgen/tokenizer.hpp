#ifndef CFGEN_TOKENIZER_HPP
#define CFGEN_TOKENIZER_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace cfgen {

// One surface token with its character span in the source text.
struct RawToken {
  std::string text;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
};

// Whitespace tokenizer with punctuation splitting: runs of non-space,
// non-punctuation bytes form word tokens; each punctuation byte is its own
// token. Spans index into the original string.
std::vector<RawToken> tokenize_raw(const std::string& text);

// Word tokens only, as strings.
std::vector<std::string> tokenize_words(const std::string& text);

// ASCII lowercase.
std::string to_lower(const std::string& s);

bool is_punctuation_token(const std::string& token);

}  // namespace cfgen

#endif  // CFGEN_TOKENIZER_HPP
