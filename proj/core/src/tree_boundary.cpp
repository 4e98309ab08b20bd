#include "hyperwind/tree_boundary.hpp"

#include <algorithm>

#include "hyperwind/error.hpp"

namespace hyperwind {
namespace {

class PeriodicSource final : public LetterSource {
 public:
  explicit PeriodicSource(Word period) : period_(std::move(period)) {}
  bool extend(std::vector<Letter>& out, std::size_t target) override {
    while (out.size() < target) {
      out.push_back(period_[phase_]);
      phase_ = (phase_ + 1) % period_.size();
    }
    return true;
  }

 private:
  Word period_;
  std::size_t phase_ = 0;
};

class EmptySource final : public LetterSource {
 public:
  bool extend(std::vector<Letter>& out, std::size_t target) override { return out.size() >= target; }
};

/// g . base: the head (g with its cancelled suffix removed) followed by the
/// letters of base from `offset` on.
class TranslatedSource final : public LetterSource {
 public:
  TranslatedSource(BoundaryWord base, std::size_t offset) : base_(std::move(base)), offset_(offset) {}
  bool extend(std::vector<Letter>& out, std::size_t target) override {
    // `out` already holds the head plus `taken_` letters of base.
    while (out.size() < target) {
      if (!base_.try_require(offset_ + taken_ + 1)) return false;
      out.push_back(base_.at(offset_ + taken_));
      ++taken_;
    }
    return true;
  }

 private:
  BoundaryWord base_;
  std::size_t offset_;
  std::size_t taken_ = 0;
};

}  // namespace

BoundaryWord::BoundaryWord(std::unique_ptr<LetterSource> source, std::vector<Letter> known)
    : state_(std::make_shared<State>()) {
  state_->source = std::move(source);
  state_->letters = std::move(known);
}

BoundaryWord BoundaryWord::periodic(const Word& prefix, const Word& period) {
  if (period.empty()) throw DomainError("periodic boundary word needs a non-empty period");
  if (stable_length(period) != period.size())
    throw DomainError("period of a boundary word must be cyclically reduced");
  if (!prefix.empty() && prefix.back().cancels(period[0]))
    throw DomainError("prefix and period of a boundary word cancel");
  std::vector<Letter> known(prefix.begin(), prefix.end());
  return BoundaryWord(std::make_unique<PeriodicSource>(period), std::move(known));
}

BoundaryWord BoundaryWord::finite(const Word& w) {
  return BoundaryWord(std::make_unique<EmptySource>(), std::vector<Letter>(w.begin(), w.end()));
}

bool BoundaryWord::try_require(std::size_t n) const {
  if (!state_) return n == 0;
  std::lock_guard lock(state_->mutex);
  if (state_->letters.size() >= n) return true;
  if (state_->exhausted) return false;
  if (!state_->source->extend(state_->letters, n)) {
    state_->exhausted = true;
    return state_->letters.size() >= n;
  }
  return true;
}

void BoundaryWord::require(std::size_t n) const {
  if (!try_require(n))
    throw OracleExhausted("boundary oracle exhausted before letter " + std::to_string(n));
}

Letter BoundaryWord::at(std::size_t i) const {
  require(i + 1);
  std::lock_guard lock(state_->mutex);
  return state_->letters[i];
}

std::size_t BoundaryWord::known() const {
  if (!state_) return 0;
  std::lock_guard lock(state_->mutex);
  return state_->letters.size();
}

Word BoundaryWord::prefix(std::size_t n) const {
  require(n);
  std::lock_guard lock(state_->mutex);
  return reduce(std::span<const Letter>(state_->letters.data(), n));
}

BoundaryWord translate(const Word& g, const BoundaryWord& xi) {
  std::size_t cancel = 0;
  while (cancel < g.size()) {
    if (!xi.try_require(cancel + 1))
      throw OracleExhausted("boundary oracle exhausted while translating");
    if (!g[g.size() - 1 - cancel].cancels(xi.at(cancel))) break;
    ++cancel;
  }
  const Word head = g.prefix(g.size() - cancel);
  std::vector<Letter> known(head.begin(), head.end());
  return BoundaryWord(std::make_unique<TranslatedSource>(xi, cancel), std::move(known));
}

std::size_t gromov_product(const Word& a, const Word& b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

std::size_t gromov_product(const Word& a, const BoundaryWord& xi) {
  std::size_t i = 0;
  while (i < a.size()) {
    xi.require(i + 1);
    if (a[i] != xi.at(i)) break;
    ++i;
  }
  return i;
}

std::size_t gromov_product(const BoundaryWord& a, const BoundaryWord& b, std::size_t cap) {
  std::size_t i = 0;
  while (i < cap && a.at(i) == b.at(i)) ++i;
  return i;
}

std::int64_t horofunction(const BoundaryWord& xi, const Word& y) {
  return static_cast<std::int64_t>(y.size()) - 2 * static_cast<std::int64_t>(gromov_product(y, xi));
}

std::int64_t busemann_cocycle(const Word& g, const BoundaryWord& xi) { return horofunction(xi, invert(g)); }

RayPoint ray_point(const BoundaryWord& xi, std::size_t t) { return RayPoint{xi.prefix(t), t}; }

std::int64_t tracking_distance(const Word& w, const BoundaryWord& xi) {
  return 2 * (static_cast<std::int64_t>(w.size()) - static_cast<std::int64_t>(gromov_product(w, xi)));
}

}  // namespace hyperwind
