#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "vfree/error.hpp"

namespace vfree::detail {

// One letter of a word: a symbol raised to a (nonzero) integer power.
struct Letter {
  std::string symbol;
  long long exponent = 1;
};

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Splits "a b^-1 c^3" (separators: whitespace or '*') into letters. The
// token "1" denotes the identity and contributes nothing.
inline std::vector<Letter> tokenize_word(std::string_view text) {
  std::vector<Letter> letters;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i]) || text[i] == '*') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j]) && text[j] != '*') ++j;
    std::string_view token = text.substr(i, j - i);
    i = j;
    if (token == "1") continue;
    Letter letter;
    auto caret = token.find('^');
    letter.symbol = std::string(token.substr(0, caret));
    if (letter.symbol.empty()) throw Error("malformed word token '" + std::string(token) + "'");
    if (caret != std::string_view::npos) {
      std::string_view exp = token.substr(caret + 1);
      long long value = 0;
      auto [ptr, ec] = std::from_chars(exp.data(), exp.data() + exp.size(), value);
      if (ec != std::errc() || ptr != exp.data() + exp.size())
        throw Error("malformed exponent in token '" + std::string(token) + "'");
      letter.exponent = value;
    }
    if (letter.exponent != 0) letters.push_back(std::move(letter));
  }
  return letters;
}

inline std::string render_letter(std::string_view symbol, long long exponent) {
  std::string out(symbol);
  if (exponent != 1) out += "^" + std::to_string(exponent);
  return out;
}

}  // namespace vfree::detail
