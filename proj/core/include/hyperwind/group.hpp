#pragma once

// Free-group arithmetic: reduced words, the word metric, abelianization and
// stable length. Letters are packed signed bytes (+g for generator g, -g for
// its inverse); the identity is the empty word.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperwind {

class Letter {
 public:
  constexpr Letter() = default;
  /// `generator` is 1-based; `sign` is +1 or -1.
  constexpr Letter(int generator, int sign)
      : value_(static_cast<std::int8_t>(sign < 0 ? -generator : generator)) {}

  static constexpr Letter from_code(std::int8_t code) {
    Letter l;
    l.value_ = code;
    return l;
  }

  constexpr int generator() const { return value_ < 0 ? -value_ : value_; }
  constexpr int sign() const { return value_ < 0 ? -1 : 1; }
  constexpr std::int8_t code() const { return value_; }
  constexpr Letter inverse() const { return from_code(static_cast<std::int8_t>(-value_)); }
  constexpr bool cancels(Letter other) const { return value_ == -other.value_; }

  /// Dense index in [0, 2k): 2(g-1) for g, 2(g-1)+1 for g^-1.
  constexpr int dense_index() const { return 2 * (generator() - 1) + (value_ < 0 ? 1 : 0); }

  friend constexpr bool operator==(Letter, Letter) = default;
  /// Generator order, positive letter before its inverse.
  friend constexpr auto operator<=>(Letter a, Letter b) { return a.dense_index() <=> b.dense_index(); }

 private:
  std::int8_t value_ = 0;
};

using AbelianVector = std::vector<std::int64_t>;

/// A reduced word. Construction through `reduce` or the cancelling
/// `push_back` keeps the invariant.
class Word {
 public:
  Word() = default;

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter back() const { return letters_.back(); }
  std::span<const Letter> letters() const { return letters_; }
  auto begin() const { return letters_.begin(); }
  auto end() const { return letters_.end(); }

  /// Right multiplication by a single letter with free cancellation.
  void push_back(Letter l) {
    if (!letters_.empty() && letters_.back().cancels(l))
      letters_.pop_back();
    else
      letters_.push_back(l);
  }
  void append(std::span<const Letter> ls) {
    for (Letter l : ls) push_back(l);
  }

  Word prefix(std::size_t n) const;
  Word suffix_from(std::size_t start) const;

  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Letter> letters_;
};

/// Shortlex: shorter first, then lexicographic on letters.
bool shortlex_less(const Word& a, const Word& b);

Word reduce(std::span<const Letter> letters);
Word multiply(const Word& a, const Word& b);
Word invert(const Word& w);
Word power(const Word& w, std::size_t n);
inline std::size_t word_length(const Word& w) { return w.size(); }

/// Images of the k generators in Z^d; `images[g-1]` is the image of generator g.
struct Projection {
  std::size_t dim = 0;
  std::vector<AbelianVector> images;

  std::size_t rank() const { return images.size(); }
  /// The canonical map F_k -> Z^k sending generator g to the g-th basis vector.
  static Projection canonical(std::size_t k);
  void validate(std::size_t k) const;
};

AbelianVector abelianize(const Word& w, const Projection& pi);
AbelianVector abelianize(std::span<const Letter> letters, const Projection& pi);

/// Length of the cyclically reduced core of `w`.
std::size_t stable_length(const Word& w);

/// Letter names: generator g is the g-th character of `names` in lower case,
/// its inverse the same character in upper case.
class Alphabet {
 public:
  explicit Alphabet(std::size_t rank);
  std::size_t rank() const { return names_.size(); }
  Word parse(std::string_view text) const;
  std::string format(const Word& w) const;
  char name(Letter l) const;

 private:
  std::string names_;
};

}  // namespace hyperwind
