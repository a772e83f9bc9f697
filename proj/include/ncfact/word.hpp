// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef NCFACT_WORD_HPP
#define NCFACT_WORD_HPP

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ncfact {

inline constexpr int kDefaultMaxGenerator = 16;

/// One letter of a monomial: the generator x_j (starred = false) or its
/// adjoint x_j* (starred = true). Indices are 1-based.
struct Letter {
  int gen_index = 1;
  bool starred = false;

  Letter star() const { return {gen_index, !starred}; }

  friend bool operator==(const Letter&, const Letter&) = default;
  // Smaller index first, and x_j before x_j*.
  friend std::strong_ordering operator<=>(const Letter& l, const Letter& r) {
    if (auto c = l.gen_index <=> r.gen_index; c != 0) return c;
    return (l.starred ? 1 : 0) <=> (r.starred ? 1 : 0);
  }
};

/// A monomial in the free *-monoid: a finite sequence of letters. The empty
/// sequence is the unit. No rewriting is ever applied; x_j x_j* stays a
/// two-letter word at the symbolic level.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  static Word unit() { return Word{}; }

  std::size_t degree() const { return letters_.size(); }
  bool is_unit() const { return letters_.empty(); }
  const std::vector<Letter>& letters() const { return letters_; }

  Word concat(const Word& other) const {
    std::vector<Letter> joined = letters_;
    joined.insert(joined.end(), other.letters_.begin(), other.letters_.end());
    return Word(std::move(joined));
  }

  /// Adjoint of the monomial: reversed order, every letter starred.
  Word star() const {
    std::vector<Letter> rev(letters_.rbegin(), letters_.rend());
    for (auto& l : rev) l = l.star();
    return Word(std::move(rev));
  }

  /// Largest generator index appearing in the word (0 for the unit).
  int max_generator() const {
    int m = 0;
    for (const auto& l : letters_) m = std::max(m, l.gen_index);
    return m;
  }

  friend bool operator==(const Word&, const Word&) = default;
  // Graded lexicographic: by degree, then letter by letter.
  friend std::strong_ordering operator<=>(const Word& l, const Word& r) {
    if (auto c = l.letters_.size() <=> r.letters_.size(); c != 0) return c;
    for (std::size_t i = 0; i < l.letters_.size(); ++i) {
      if (auto c = l.letters_[i] <=> r.letters_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

 private:
  std::vector<Letter> letters_;
};

/// Parses the whitespace-separated token grammar: token := "x" <index> ["*"],
/// and the single token "1" for the unit word. Throws InputError on malformed
/// tokens or indices outside [1, max_gen].
Word parse_word(std::string_view text, int max_gen = kDefaultMaxGenerator);

/// Inverse of parse_word; the unit word prints as "1".
std::string format_word(const Word& w);

}  // namespace ncfact

#endif  // NCFACT_WORD_HPP
