#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "morseb/errors.hpp"

namespace morseb {

/// A letter of a regular tree's edge alphabet.  Letters come in inverse
/// pairs: 2k and 2k+1 are mutually inverse, so an even branching degree d
/// yields the Cayley graph of a free group of rank d/2.
using Letter = std::int8_t;

inline Letter inverse_letter(Letter l) { return static_cast<Letter>(l ^ 1); }

/// A reduced edge word (no letter immediately followed by its inverse).
using Word = std::vector<Letter>;

inline bool is_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] == inverse_letter(w[i - 1])) return false;
  return true;
}

/// Appends a letter with free cancellation.
inline void push_reduced(Word& w, Letter l) {
  if (!w.empty() && w.back() == inverse_letter(l))
    w.pop_back();
  else
    w.push_back(l);
}

inline Word concat_reduce(const Word& u, const Word& v) {
  Word out = u;
  out.reserve(u.size() + v.size());
  for (Letter l : v) push_reduced(out, l);
  return out;
}

inline Word inverse_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it)
    out.push_back(inverse_letter(*it));
  return out;
}

/// Length of the longest common prefix of two reduced words.
inline std::size_t common_prefix_length(const Word& u, const Word& v) {
  std::size_t k = 0;
  while (k < u.size() && k < v.size() && u[k] == v[k]) ++k;
  return k;
}

/// Word-metric distance between two vertices of the tree of reduced words.
inline double word_distance(const Word& u, const Word& v) {
  const std::size_t k = common_prefix_length(u, v);
  return static_cast<double>(u.size() + v.size() - 2 * k);
}

inline std::string word_to_string(const Word& w) {
  static const char* names = "aAbBcCdDeEfFgGhH";
  if (w.empty()) return "e";
  std::string s;
  s.reserve(w.size());
  for (Letter l : w) {
    if (l < 0 || l >= 16) throw invalid_parameter_error("letter out of printable range");
    s.push_back(names[l]);
  }
  return s;
}

inline Word word_from_string(const std::string& s) {
  static const std::string names = "aAbBcCdDeEfFgGhH";
  Word w;
  if (s == "e" || s.empty()) return w;
  for (char c : s) {
    const auto pos = names.find(c);
    if (pos == std::string::npos) throw config_error("unknown edge letter: " + std::string(1, c));
    w.push_back(static_cast<Letter>(pos));
  }
  if (!is_reduced(w)) throw config_error("edge word is not reduced: " + s);
  return w;
}

}  // namespace morseb
