#include "hyperwind/walk.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "hyperwind/error.hpp"
#include "hyperwind/rng.hpp"

namespace hyperwind {

void StoppingSpec::validate() const {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0)) throw DomainError("stopping thresholds must be positive");
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) throw DomainError("stopping thresholds must increase");
  }
  if (!thresholds.empty() && !(lambda_ref > 0.0)) throw DomainError("stopping needs a positive lambda reference");
}

std::size_t ObservationPlan::effective_stride() const {
  if (stride > 0) return stride;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(horizon)))));
}

std::vector<std::size_t> ObservationPlan::checkpoint_steps() const {
  std::vector<std::size_t> out;
  const std::size_t s = effective_stride();
  for (std::size_t k = 0; k < horizon; k += s) out.push_back(k);
  out.push_back(horizon);
  return out;
}

std::optional<std::size_t> PathRecord::checkpoint_index(std::uint64_t step) const {
  const auto it = std::lower_bound(steps.begin(), steps.end(), step);
  if (it == steps.end() || *it != step) return std::nullopt;
  return static_cast<std::size_t>(it - steps.begin());
}

namespace {

/// Sliding-window minimum over a fixed number of trailing steps.
class WindowMin {
 public:
  explicit WindowMin(std::size_t window) : cap_(window + 1), step_(cap_), value_(cap_) {}

  void push(std::uint64_t step, std::uint32_t value) {
    while (size_ > 0 && value_[back()] >= value) --size_;
    const std::size_t slot = (head_ + size_) % cap_;
    step_[slot] = step;
    value_[slot] = value;
    ++size_;
  }
  /// Minimum over steps in (now - window, now].
  std::uint32_t min(std::uint64_t now) {
    while (step_[head_] + (cap_ - 1) <= now) {
      head_ = (head_ + 1) % cap_;
      --size_;
    }
    return value_[head_];
  }

 private:
  std::size_t back() const { return (head_ + size_ - 1) % cap_; }
  std::size_t cap_;
  std::vector<std::uint64_t> step_;
  std::vector<std::uint32_t> value_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

struct AtomTable {
  std::vector<std::vector<Letter>> letters;
  std::vector<AbelianVector> images;

  explicit AtomTable(const WalkSpec& spec) {
    for (const auto& a : spec.measure.atoms()) {
      letters.emplace_back(a.word.begin(), a.word.end());
      images.push_back(abelianize(a.word, spec.projection));
    }
  }
};

/// The tree walk as a stack of letters, with the stabilization rule applied
/// after every step when confirmation is enabled.
class TreeWalker {
 public:
  TreeWalker(const WalkSpec& spec, std::uint64_t seed, const StabilizationParams& params, std::size_t horizon,
             bool confirm)
      : spec_(spec),
        atoms_(spec),
        rng_(seed, Stream::steps),
        params_(params),
        horizon_(horizon),
        window_(params.window(horizon)),
        confirm_(confirm),
        sizes_(confirm ? window_ + 1 : 0),
        lows_(confirm ? window_ : 1),
        pi_(spec.dim(), 0) {
    if (confirm_ && !(params_.lambda > 0.0))
      throw DomainError("boundary extraction needs a positive escape-rate reference");
    if (confirm_) sizes_[0] = 0;
    word_.reserve(1024);
  }

  std::size_t step() {
    const std::size_t a = spec_.measure.pick(rng_.at(k_));
    ++k_;
    std::size_t low = word_.size();
    for (Letter l : atoms_.letters[a]) {
      if (!word_.empty() && word_.back().cancels(l)) {
        word_.pop_back();
        low = std::min(low, word_.size());
      } else {
        word_.push_back(l);
      }
    }
    if (low < confirmed_)
      throw StabilizationFailure("walk backtracked below a confirmed prefix (" + std::to_string(low) + " < " +
                                 std::to_string(confirmed_) + ")");
    popdepth_ = low;
    const auto& img = atoms_.images[a];
    for (std::size_t i = 0; i < pi_.size(); ++i) pi_[i] += img[i];
    if (confirm_) update_confirmation();
    return a;
  }

  /// Steps until at least `target` letters are confirmed.
  void confirm_to(std::size_t target) {
    while (confirmed_ < target) {
      check_budget();
      step();
    }
  }

  void check_budget() const {
    const double lag = 4.0 * std::max(static_cast<double>(horizon_), (confirmed_ + 1) / params_.lambda);
    if (static_cast<double>(k_) > lag + 4.0 * static_cast<double>(window_) + 1000.0)
      throw StabilizationFailure("boundary prefix failed to stabilize after " + std::to_string(k_) + " steps");
  }

  std::uint64_t steps() const { return k_; }
  std::size_t size() const { return word_.size(); }
  std::size_t popdepth() const { return popdepth_; }
  std::size_t confirmed() const { return confirmed_; }
  const std::vector<Letter>& word() const { return word_; }
  const AbelianVector& pi() const { return pi_; }
  const AtomTable& atoms() const { return atoms_; }

 private:
  void update_confirmation() {
    sizes_[k_ % (window_ + 1)] = static_cast<std::uint32_t>(word_.size());
    lows_.push(k_, static_cast<std::uint32_t>(popdepth_));
    if (k_ < window_) return;
    const std::size_t low = std::min<std::size_t>(sizes_[(k_ - window_) % (window_ + 1)], lows_.min(k_));
    const double kd = static_cast<double>(k_);
    const double cap = std::floor(params_.lambda * kd - 3.0 * params_.sigma * std::sqrt(kd));
    if (cap <= 0.0) return;
    const std::size_t c = std::min({low, static_cast<std::size_t>(cap), word_.size()});
    confirmed_ = std::max(confirmed_, c);
  }

  const WalkSpec& spec_;
  AtomTable atoms_;
  CounterStream rng_;
  StabilizationParams params_;
  std::size_t horizon_;
  std::size_t window_;
  bool confirm_;
  std::vector<std::uint32_t> sizes_;
  WindowMin lows_;
  std::vector<Letter> word_;
  AbelianVector pi_;
  std::uint64_t k_ = 0;
  std::size_t popdepth_ = 0;
  std::size_t confirmed_ = 0;
};

class WalkSource : public LetterSource {
 public:
  WalkSource(WalkSpec spec, std::uint64_t seed, StabilizationParams params, std::size_t horizon)
      : spec_(std::make_unique<WalkSpec>(std::move(spec))), walker_(*spec_, seed, params, horizon, true) {}

  bool extend(std::vector<Letter>& out, std::size_t target) override {
    walker_.confirm_to(target);
    const auto& w = walker_.word();
    out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(out.size()),
               w.begin() + static_cast<std::ptrdiff_t>(walker_.confirmed()));
    return true;
  }

 private:
  std::unique_ptr<WalkSpec> spec_;
  TreeWalker walker_;
};

/// Cached letters of a reference boundary word for the hot loop.
class RefCache {
 public:
  explicit RefCache(BoundaryWord xi) : xi_(std::move(xi)) {}
  Letter at(std::size_t i) {
    if (i >= letters_.size()) {
      const std::size_t want = std::max<std::size_t>(2 * i + 64, 1024);
      if (!xi_.try_require(want)) xi_.require(i + 1);
      const std::size_t have = std::min(want, xi_.known());
      for (std::size_t j = letters_.size(); j < have; ++j) letters_.push_back(xi_.at(j));
    }
    return letters_[i];
  }

 private:
  BoundaryWord xi_;
  std::vector<Letter> letters_;
};

double dot(std::span<const double> f, std::span<const std::int64_t> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * static_cast<double>(v[i]);
  return s;
}

struct ExitTracker {
  ExitWindow window;
  ExitResult result;
  bool done = false;

  void observe(double y, std::int64_t time) {
    if (done) return;
    if (y > window.upper()) {
      result = {1, time};
      done = true;
    } else if (y < window.lower()) {
      result = {-1, time};
      done = true;
    } else if (static_cast<double>(time) >= window.horizon()) {
      result = {0, time};
      done = true;
    }
  }
};

void check_plan(const WalkSpec& spec, const ObservationPlan& plan) {
  plan.stopping.validate();
  const std::size_t d = spec.dim();
  if (spec.projection.rank() != spec.measure.rank())
    throw DomainError("projection rank does not match the measure's alphabet");
  if (!plan.exits.empty()) {
    if (plan.functional.size() != d) throw DomainError("exit observers need a functional of dimension d");
    if (plan.drift.size() != d) throw DomainError("exit observers need a drift of dimension d");
  }
  if (!std::is_sorted(plan.ray_times.begin(), plan.ray_times.end()))
    throw DomainError("ray times must be sorted");
  if (spec.kind == ModelKind::tree) {
    if (!plan.plane_refs.empty()) throw DomainError("tree walks take boundary-word references");
    if (!plan.exits.empty() && plan.tree_refs.empty())
      throw DomainError("martingale exit observers need a reference boundary point");
  } else {
    if (!plan.tree_refs.empty()) throw DomainError("plane walks take angle references");
    if (plan.tracking || !plan.exits.empty())
      throw DomainError("tracking and exit observers are implemented for the tree model only");
    for (double t : plan.ray_times)
      if (t > 27.0) throw DomainError("plane ray times beyond 27 leave double precision");
  }
}

PathRecord make_record(const WalkSpec& spec, const ObservationPlan& plan, std::uint64_t seed, std::size_t index) {
  PathRecord rec;
  rec.seed = seed;
  rec.index = index;
  rec.horizon = plan.horizon;
  rec.dim = spec.dim();
  rec.refs = plan.reference_count();
  for (double s : plan.stopping.thresholds) rec.stopping.push_back(StoppingHit{s, kCensored, 0.0, {}, kCensored});
  rec.ray_times = plan.ray_times;
  return rec;
}

PathRecord sample_tree(const WalkSpec& spec, const ObservationPlan& plan, std::uint64_t seed, std::size_t index) {
  PathRecord rec = make_record(spec, plan, seed, index);
  const std::size_t d = rec.dim;
  const bool boundary = plan.needs_boundary();
  TreeWalker walker(spec, seed, plan.stabilization, plan.horizon, boundary);

  std::vector<RefCache> refs;
  for (const auto& x : plan.tree_refs) refs.emplace_back(x);
  std::vector<std::size_t> gromov(refs.size(), 0);

  const auto checkpoints = plan.checkpoint_steps();
  std::size_t next_cp = 0;
  std::size_t next_stop = 0;
  const auto& thresholds = plan.stopping.thresholds;

  std::vector<std::uint32_t> popdepths;
  std::vector<std::uint32_t> sizes;
  if (plan.tracking) {
    popdepths.reserve(plan.horizon * 2);
    sizes.reserve(plan.horizon + 1);
    sizes.push_back(0);
    popdepths.push_back(0);
  }

  // Ray observers fed by confirmed letters.
  std::vector<std::int64_t> ray_times;
  for (double t : plan.ray_times) ray_times.push_back(static_cast<std::int64_t>(std::llround(t)));
  std::size_t next_ray = 0;
  AbelianVector ray_pi(d, 0);
  std::size_t emitted = 0;

  std::vector<ExitTracker> ray_exits, mart_exits;
  for (const auto& w : plan.exits) {
    ray_exits.push_back(ExitTracker{w, {}, false});
    mart_exits.push_back(ExitTracker{w, {}, false});
  }
  const double fe = plan.exits.empty() ? 0.0 : std::inner_product(plan.functional.begin(), plan.functional.end(),
                                                                   plan.drift.begin(), 0.0);
  std::vector<double> atom_f;
  for (const auto& img : walker.atoms().images) atom_f.push_back(plan.exits.empty() ? 0.0 : dot(plan.functional, img));
  double mart_f = 0.0;
  double ray_f = 0.0;

  std::size_t max_size = 0;
  auto record_checkpoint = [&](std::uint64_t k) {
    rec.steps.push_back(k);
    rec.t.push_back(static_cast<double>(walker.size()));
    rec.winding.insert(rec.winding.end(), walker.pi().begin(), walker.pi().end());
    for (std::size_t j = 0; j < refs.size(); ++j)
      rec.busemann.push_back(static_cast<double>(walker.size()) - 2.0 * static_cast<double>(gromov[j]));
  };
  auto open_exits = [&](const std::vector<ExitTracker>& ts) {
    return std::any_of(ts.begin(), ts.end(), [](const ExitTracker& t) { return !t.done; });
  };

  if (checkpoints.front() == 0) {
    record_checkpoint(0);
    ++next_cp;
  }
  for (auto& t : mart_exits) t.observe(0.0, 0);
  while (next_ray < ray_times.size() && ray_times[next_ray] <= 0) {
    rec.ray_winding.insert(rec.ray_winding.end(), d, 0);
    ++next_ray;
  }

  for (;;) {
    const std::uint64_t k = walker.steps();
    if (k >= plan.horizon) {
      const std::size_t required =
          std::max<std::size_t>(ray_times.empty() ? 0 : static_cast<std::size_t>(ray_times.back()),
                                plan.tracking ? max_size : 0);
      const bool more = (boundary && emitted < required) || open_exits(ray_exits) || open_exits(mart_exits);
      if (!more) break;
      if (boundary) walker.check_budget();
    }
    const std::size_t a = walker.step();
    const std::uint64_t kk = walker.steps();
    const std::size_t pd = walker.popdepth();
    const auto& word = walker.word();

    for (std::size_t j = 0; j < refs.size(); ++j) {
      std::size_t g = std::min(gromov[j], pd);
      while (g == word.size() ? false : (g >= pd && word[g] == refs[j].at(g))) ++g;
      gromov[j] = g;
    }
    if (plan.tracking) {
      popdepths.push_back(static_cast<std::uint32_t>(pd));
      if (kk <= plan.horizon) sizes.push_back(static_cast<std::uint32_t>(word.size()));
    }
    if (kk <= plan.horizon) {
      max_size = std::max(max_size, word.size());
      while (next_stop < thresholds.size() &&
             static_cast<double>(word.size()) >= thresholds[next_stop] * plan.stopping.lambda_ref) {
        auto& hit = rec.stopping[next_stop++];
        hit.tau = static_cast<std::int64_t>(kk);
        hit.t = static_cast<double>(word.size());
        hit.winding = walker.pi();
      }
      if (next_cp < checkpoints.size() && checkpoints[next_cp] == kk) {
        record_checkpoint(kk);
        ++next_cp;
      }
    }
    if (!mart_exits.empty()) {
      mart_f += atom_f[a];
      const double h = static_cast<double>(word.size()) - 2.0 * static_cast<double>(gromov[0]);
      for (auto& t : mart_exits) t.observe(mart_f - h * fe, static_cast<std::int64_t>(kk));
    }
    while (emitted < walker.confirmed()) {
      const Letter l = word[emitted++];
      const auto& img = spec.projection.images[static_cast<std::size_t>(l.generator() - 1)];
      for (std::size_t i = 0; i < d; ++i) ray_pi[i] += l.sign() * img[i];
      if (!ray_exits.empty()) {
        double step_f = 0.0;
        for (std::size_t i = 0; i < d; ++i) step_f += plan.functional[i] * l.sign() * static_cast<double>(img[i]);
        ray_f += step_f;
        const auto time = static_cast<std::int64_t>(emitted);
        for (auto& t : ray_exits) t.observe(ray_f - static_cast<double>(time) * fe, time);
      }
      while (next_ray < ray_times.size() && ray_times[next_ray] == static_cast<std::int64_t>(emitted)) {
        rec.ray_winding.insert(rec.ray_winding.end(), ray_pi.begin(), ray_pi.end());
        ++next_ray;
      }
    }
  }

  if (plan.tracking) {
    // (w_k | xi) = min(|w_k|, min over j > k of the depth reached by the pops at step j).
    std::vector<std::uint32_t> future(sizes.size());
    std::uint32_t m = std::numeric_limits<std::uint32_t>::max();
    for (std::size_t j = popdepths.size(); j-- > 1;) {
      m = std::min(m, popdepths[j]);
      if (j - 1 < future.size()) future[j - 1] = m;
    }
    auto tracking_at = [&](std::size_t k) {
      const std::uint32_t common = std::min(sizes[k], future[k]);
      return 2 * static_cast<std::int64_t>(sizes[k] - common);
    };
    rec.max_tracking = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) rec.max_tracking = std::max(rec.max_tracking, tracking_at(k));
    for (auto& hit : rec.stopping)
      if (hit.tau != kCensored) hit.tracking = tracking_at(static_cast<std::size_t>(hit.tau));
  }
  for (auto& t : ray_exits) rec.ray_exits.push_back(t.result);
  for (auto& t : mart_exits) rec.martingale_exits.push_back(t.result);
  rec.steps_simulated = walker.steps();
  rec.partial = next_stop < thresholds.size();
  return rec;
}

/// Plane walk: the product is kept as a scaled isometry; the limit direction
/// is read once the orbit point is far enough out to pin it to double precision.
class PlaneWalker {
 public:
  static constexpr double kDirectionDistance = 45.0;

  PlaneWalker(const WalkSpec& spec, std::uint64_t seed) : spec_(spec), rng_(seed, Stream::steps), pi_(spec.dim(), 0) {
    for (const auto& a : spec.measure.atoms()) {
      isos_.push_back(spec.schottky.evaluate(a.word));
      images_.push_back(abelianize(a.word, spec.projection));
    }
  }

  void step() {
    const std::size_t a = spec_.measure.pick(rng_.at(k_));
    ++k_;
    g_.right_multiply(isos_[a]);
    for (std::size_t i = 0; i < pi_.size(); ++i) pi_[i] += images_[a][i];
  }

  plane::CircleBoundaryPoint settle(std::size_t horizon) {
    const std::uint64_t budget = 100 * static_cast<std::uint64_t>(horizon) + 100000;
    while (g_.distance_from_origin() < kDirectionDistance) {
      if (k_ > budget) throw StabilizationFailure("plane walk failed to escape to the boundary");
      step();
    }
    return plane::CircleBoundaryPoint{g_.direction()};
  }

  std::uint64_t steps() const { return k_; }
  const plane::ScaledIsometry& position() const { return g_; }
  const AbelianVector& pi() const { return pi_; }

 private:
  const WalkSpec& spec_;
  CounterStream rng_;
  std::vector<plane::Isometry> isos_;
  std::vector<AbelianVector> images_;
  plane::ScaledIsometry g_;
  AbelianVector pi_;
  std::uint64_t k_ = 0;
};

PathRecord sample_plane(const WalkSpec& spec, const ObservationPlan& plan, std::uint64_t seed, std::size_t index) {
  PathRecord rec = make_record(spec, plan, seed, index);
  PlaneWalker walker(spec, seed);
  std::vector<plane::Complex> refs;
  for (double a : plan.plane_refs) refs.push_back(std::polar(1.0, a));

  auto record_checkpoint = [&](std::uint64_t k) {
    rec.steps.push_back(k);
    rec.t.push_back(walker.position().distance_from_origin());
    rec.winding.insert(rec.winding.end(), walker.pi().begin(), walker.pi().end());
    for (const auto& x : refs) rec.busemann.push_back(walker.position().busemann(x));
  };
  const auto checkpoints = plan.checkpoint_steps();
  std::size_t next_cp = 0;
  std::size_t next_stop = 0;
  const auto& thresholds = plan.stopping.thresholds;
  if (checkpoints.front() == 0) {
    record_checkpoint(0);
    ++next_cp;
  }
  while (walker.steps() < plan.horizon) {
    walker.step();
    const std::uint64_t k = walker.steps();
    const double t = walker.position().distance_from_origin();
    while (next_stop < thresholds.size() && t >= thresholds[next_stop] * plan.stopping.lambda_ref) {
      auto& hit = rec.stopping[next_stop++];
      hit.tau = static_cast<std::int64_t>(k);
      hit.t = t;
      hit.winding = walker.pi();
    }
    if (next_cp < checkpoints.size() && checkpoints[next_cp] == k) {
      record_checkpoint(k);
      ++next_cp;
    }
  }
  if (!plan.ray_times.empty()) {
    const auto xi = walker.settle(plan.horizon);
    rec.limit_angle = xi.angle();
    for (double t : plan.ray_times) {
      const auto w = plane::winding_at(spec.schottky, spec.projection, plane::ray_point_disk(xi, t),
                                       plan.plane_search_depth);
      rec.ray_winding.insert(rec.ray_winding.end(), w.begin(), w.end());
    }
  }
  rec.steps_simulated = walker.steps();
  rec.partial = next_stop < thresholds.size();
  return rec;
}

}  // namespace

PathRecord sample_path(const WalkSpec& spec, const ObservationPlan& plan, std::uint64_t seed, std::size_t index) {
  check_plan(spec, plan);
  if (spec.kind == ModelKind::plane) return sample_plane(spec, plan, seed, index);
  if (!plan.needs_boundary()) return sample_tree(spec, plan, seed, index);
  // A falsely confirmed prefix is retried with the confirmation window
  // doubled, twice, before giving up.
  ObservationPlan retry = plan;
  for (int attempt = 0;; ++attempt) {
    try {
      return sample_tree(spec, retry, seed, index);
    } catch (const StabilizationFailure&) {
      if (attempt == 2) throw;
      retry.stabilization.min_window = 2 * retry.stabilization.window(retry.horizon);
    }
  }
}

BoundaryWord limit_boundary_point(const WalkSpec& spec, const StabilizationParams& params, std::size_t horizon,
                                  std::uint64_t seed) {
  if (spec.kind != ModelKind::tree) throw DomainError("boundary words exist for the tree model only");
  return BoundaryWord(std::make_unique<WalkSource>(spec, seed, params, horizon));
}

BoundaryWord limit_boundary_point(const PathRecord& path, const WalkSpec& spec, const StabilizationParams& params) {
  return limit_boundary_point(spec, params, path.horizon, path.seed);
}

plane::CircleBoundaryPoint limit_circle_point(const WalkSpec& spec, std::size_t horizon, std::uint64_t seed) {
  if (spec.kind != ModelKind::plane) throw DomainError("circle limit points exist for the plane model only");
  PlaneWalker walker(spec, seed);
  while (walker.steps() < horizon) walker.step();
  return walker.settle(horizon);
}

void replay(const WalkSpec& spec, std::uint64_t seed, std::size_t n,
            const std::function<void(std::size_t, std::span<const Letter>)>& visit) {
  if (spec.kind != ModelKind::tree) throw DomainError("replay of positions is for the tree model");
  TreeWalker walker(spec, seed, StabilizationParams{}, n, false);
  visit(0, walker.word());
  while (walker.steps() < n) {
    walker.step();
    visit(walker.steps(), walker.word());
  }
}

Word position_at(const WalkSpec& spec, std::uint64_t seed, std::size_t n) {
  Word w;
  replay(spec, seed, n, [&](std::size_t k, std::span<const Letter> letters) {
    if (k == n) w = reduce(letters);
  });
  return w;
}

}  // namespace hyperwind
