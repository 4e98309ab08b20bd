#pragma once

// Independent reference implementations used by the unit tests. They work on
// plain integer vectors and share no code with the library.

#include <cstdint>
#include <random>
#include <vector>

#include "hyperwind/group.hpp"

namespace oracle {

using IntWord = std::vector<int>;

inline IntWord free_reduce(const IntWord& w) {
  IntWord out;
  for (int x : w) {
    if (!out.empty() && out.back() == -x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

inline IntWord inverse(const IntWord& w) {
  IntWord out(w.rbegin(), w.rend());
  for (int& x : out) x = -x;
  return out;
}

inline IntWord concat(IntWord a, const IntWord& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// d(a, b) = |a^-1 b| in the Cayley tree.
inline std::int64_t distance(const IntWord& a, const IntWord& b) {
  return static_cast<std::int64_t>(free_reduce(concat(inverse(a), b)).size());
}

inline IntWord random_word(std::mt19937_64& rng, int rank, std::size_t length) {
  std::uniform_int_distribution<int> g(1, rank), s(0, 1);
  IntWord w;
  for (std::size_t i = 0; i < length; ++i) w.push_back(s(rng) ? g(rng) : -g(rng));
  return w;
}

inline hyperwind::Word to_word(const IntWord& w) {
  std::vector<hyperwind::Letter> ls;
  for (int x : w) ls.emplace_back(x < 0 ? -x : x, x < 0 ? -1 : 1);
  return hyperwind::reduce(ls);
}

inline IntWord from_word(const hyperwind::Word& w) {
  IntWord out;
  for (auto l : w) out.push_back(l.code());
  return out;
}

/// Busemann cocycle by its definition: d(g^-1, x_T) - d(o, x_T) along a
/// long prefix x_T of the boundary word.
inline std::int64_t busemann_by_limit(const IntWord& g, const IntWord& xi_prefix) {
  return distance(inverse(g), xi_prefix) - distance({}, xi_prefix);
}

}  // namespace oracle
