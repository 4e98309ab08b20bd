#pragma once

// Finitely supported step measures on F_k (tree) or on a Schottky group
// (plane). Probabilities keep their exact rational form when one was given.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "hyperwind/group.hpp"
#include "hyperwind/plane.hpp"

namespace hyperwind {

using Rational = boost::rational<std::int64_t>;

enum class ModelKind { tree, plane };

struct Atom {
  Word word;
  double probability = 0.0;
  std::optional<Rational> exact;
};

class StepMeasure {
 public:
  StepMeasure() = default;
  /// Throws MeasureError on any probability or alphabet violation.
  StepMeasure(std::size_t rank, std::vector<Atom> atoms);

  static StepMeasure uniform(std::size_t rank, const std::vector<Word>& support);
  /// Uniform on the 2k generators and their inverses.
  static StepMeasure simple(std::size_t rank);

  std::size_t rank() const { return rank_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool exact() const;
  std::size_t max_length() const { return max_length_; }

  /// Atom selected by a uniform 32-bit draw.
  std::size_t pick(std::uint32_t u) const {
    std::size_t i = 0;
    while (u >= thresholds_[i]) ++i;
    return i;
  }

 private:
  std::size_t rank_ = 0;
  std::vector<Atom> atoms_;
  std::vector<std::uint64_t> thresholds_;
  std::size_t max_length_ = 0;
};

struct MeasureReport {
  bool probabilities_ok = false;
  bool certified = false;
  /// Two non-commuting hyperbolic semigroup products (distinct axes).
  std::optional<std::pair<Word, Word>> witness;
  /// Finite support makes every moment condition hold.
  bool finite_exponential_moment = true;
  std::vector<std::string> warnings;
};

/// Checks the probability axioms (throwing MeasureError) and searches
/// semigroup products of length <= `search_length` for a non-elementary
/// certificate. For the plane model `model` must be given.
MeasureReport validate_measure(const StepMeasure& mu, const plane::SchottkyModel* model = nullptr,
                               std::size_t search_length = 4);

/// Distinct reduced semigroup products of 1..max_length support atoms, in
/// order of first appearance (length-major), at most `limit` of them.
std::vector<Word> semigroup_products(const StepMeasure& mu, std::size_t max_length, std::size_t limit = 4096);

Rational parse_rational(const std::string& text);

}  // namespace hyperwind
