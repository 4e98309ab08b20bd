#pragma once

// Boundary of the Cayley tree of F_k. On the tree the Gromov and Busemann
// boundaries coincide, so a boundary point is an infinite reduced word.
// Everything here is integer-exact.

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "hyperwind/group.hpp"

namespace hyperwind {

/// Produces further letters of an infinite reduced word on demand.
class LetterSource {
 public:
  virtual ~LetterSource() = default;
  /// Append letters to `out` until `out.size() >= target`. Returns false if
  /// the source ran dry first.
  virtual bool extend(std::vector<Letter>& out, std::size_t target) = 0;
};

/// A point of the tree boundary: a memoized, lazily extended reduced word.
/// Copies share the same memo; concurrent reads are safe.
class BoundaryWord {
 public:
  BoundaryWord() = default;
  explicit BoundaryWord(std::unique_ptr<LetterSource> source, std::vector<Letter> known = {});

  /// prefix * period^infinity. The period must be cyclically reduced and
  /// compatible with the end of the prefix.
  static BoundaryWord periodic(const Word& prefix, const Word& period);
  /// A finite word that reports exhaustion past its end (test oracles).
  static BoundaryWord finite(const Word& w);

  Letter at(std::size_t i) const;
  /// Ensures `n` letters are known; throws OracleExhausted otherwise.
  void require(std::size_t n) const;
  /// Non-throwing variant of `require`.
  bool try_require(std::size_t n) const;
  std::size_t known() const;
  Word prefix(std::size_t n) const;

 private:
  struct State {
    std::mutex mutex;
    std::vector<Letter> letters;
    std::unique_ptr<LetterSource> source;
    bool exhausted = false;
  };
  std::shared_ptr<State> state_;
};

/// g . xi, reduced.
BoundaryWord translate(const Word& g, const BoundaryWord& xi);

/// Length of the common prefix.
std::size_t gromov_product(const Word& a, const Word& b);
std::size_t gromov_product(const Word& a, const BoundaryWord& xi);
/// Capped at `cap`, since two equal boundary words have infinite product.
std::size_t gromov_product(const BoundaryWord& a, const BoundaryWord& b, std::size_t cap);

/// h_xi(y) = |y| - 2 (y|xi).
std::int64_t horofunction(const BoundaryWord& xi, const Word& y);
/// sigma(g, xi) = h_xi(g^-1).
std::int64_t busemann_cocycle(const Word& g, const BoundaryWord& xi);

struct RayPoint {
  Word point;
  std::size_t time = 0;
};
RayPoint ray_point(const BoundaryWord& xi, std::size_t t);

/// Distance from w to the ray point at time |w|.
std::int64_t tracking_distance(const Word& w, const BoundaryWord& xi);

}  // namespace hyperwind
