#pragma once

// Seeded random walks driven by a step measure, with checkpoints, stopping
// times, streaming extraction of the limit boundary point, and observers
// that follow the geodesic ray towards that limit.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hyperwind/group.hpp"
#include "hyperwind/measure.hpp"
#include "hyperwind/plane.hpp"
#include "hyperwind/tree_boundary.hpp"

namespace hyperwind {

struct WalkSpec {
  ModelKind kind = ModelKind::tree;
  StepMeasure measure;
  Projection projection;
  /// Only for the plane model.
  plane::SchottkyModel schottky;

  std::size_t dim() const { return projection.dim; }
};

struct StoppingSpec {
  /// Increasing, positive values of s.
  std::vector<double> thresholds;
  /// tau_s = first k >= 1 with t_k >= s * lambda_ref.
  double lambda_ref = 0.0;
  void validate() const;
};

/// A prefix is confirmed once it persisted over the last
/// max(min_window, horizon / 10) steps and is at most
/// lambda * k - 3 * sigma * sqrt(k), sigma being the per-step spread of t_k.
struct StabilizationParams {
  double lambda = 0.0;
  double sigma = 0.0;
  std::size_t min_window = 64;
  std::size_t window(std::size_t horizon) const { return std::max(min_window, horizon / 10); }
};

/// Exit of a scalar projection from [-k s, l s], followed until time s^3.
struct ExitWindow {
  double k = 1.0;
  double l = 1.0;
  double s = 0.0;
  double lower() const { return -k * s; }
  double upper() const { return l * s; }
  double horizon() const { return s * s * s; }
};

struct ObservationPlan {
  std::size_t horizon = 0;
  /// 0 selects round(sqrt(horizon)).
  std::size_t stride = 0;
  StoppingSpec stopping;
  StabilizationParams stabilization;
  /// Reference boundary points for Busemann values at checkpoints.
  std::vector<BoundaryWord> tree_refs;
  std::vector<double> plane_refs;
  /// Times at which the winding of the ray towards the limit point is recorded.
  std::vector<double> ray_times;
  bool tracking = false;
  std::vector<ExitWindow> exits;
  /// Linear functional projecting windings for the exit observers.
  std::vector<double> functional;
  /// Drift used to recentre windings in the exit observers.
  std::vector<double> drift;
  std::size_t plane_search_depth = 8;

  std::size_t effective_stride() const;
  std::vector<std::size_t> checkpoint_steps() const;
  bool needs_boundary() const { return !ray_times.empty() || tracking || !exits.empty(); }
  std::size_t reference_count() const { return tree_refs.size() + plane_refs.size(); }
};

inline constexpr std::int64_t kCensored = -1;

struct StoppingHit {
  double threshold = 0.0;
  /// kCensored when not hit by the horizon.
  std::int64_t tau = kCensored;
  double t = 0.0;
  AbelianVector winding;
  /// Tracking distance at tau, kCensored if not recorded.
  std::int64_t tracking = kCensored;
  friend bool operator==(const StoppingHit&, const StoppingHit&) = default;
};

struct ExitResult {
  /// +1 through the top, -1 through the bottom, 0 censored.
  int side = 0;
  std::int64_t time = kCensored;
  friend bool operator==(const ExitResult&, const ExitResult&) = default;
};

/// One sample path. Positions are not stored; they are recovered by
/// replaying the seed.
struct PathRecord {
  std::uint64_t seed = 0;
  std::size_t index = 0;
  std::size_t horizon = 0;
  std::size_t dim = 0;
  std::size_t refs = 0;

  std::vector<std::uint64_t> steps;
  std::vector<double> t;
  /// steps.size() x dim, row-major.
  std::vector<std::int64_t> winding;
  /// steps.size() x refs: h_x(w_k . o) for each reference point x.
  std::vector<double> busemann;

  std::vector<StoppingHit> stopping;

  std::vector<double> ray_times;
  /// ray_times.size() x dim.
  std::vector<std::int64_t> ray_winding;

  std::vector<ExitResult> ray_exits;
  std::vector<ExitResult> martingale_exits;

  std::int64_t max_tracking = kCensored;
  /// Plane model: angle of the limit point.
  double limit_angle = 0.0;
  std::uint64_t steps_simulated = 0;
  bool partial = false;

  std::span<const std::int64_t> winding_at(std::size_t checkpoint) const {
    return std::span(winding).subspan(checkpoint * dim, dim);
  }
  std::span<const double> busemann_at(std::size_t checkpoint) const {
    return std::span(busemann).subspan(checkpoint * refs, refs);
  }
  std::span<const std::int64_t> ray_winding_at(std::size_t i) const {
    return std::span(ray_winding).subspan(i * dim, dim);
  }
  /// Index of the checkpoint at `step`, if there is one.
  std::optional<std::size_t> checkpoint_index(std::uint64_t step) const;

  friend bool operator==(const PathRecord&, const PathRecord&) = default;
};

/// Deterministic in (spec, plan, seed).
PathRecord sample_path(const WalkSpec& spec, const ObservationPlan& plan, std::uint64_t seed, std::size_t index = 0);

/// Tree model: the limit point of the walk with this seed, as a lazily
/// extended boundary word. Letters are produced by continuing the walk and
/// applying the stabilization rule.
BoundaryWord limit_boundary_point(const WalkSpec& spec, const StabilizationParams& params, std::size_t horizon,
                                  std::uint64_t seed);
BoundaryWord limit_boundary_point(const PathRecord& path, const WalkSpec& spec, const StabilizationParams& params);

/// Plane model: the limit point of the walk with this seed.
plane::CircleBoundaryPoint limit_circle_point(const WalkSpec& spec, std::size_t horizon, std::uint64_t seed);

/// Replays the positions w_k of a tree walk for k = 0..n, calling `visit(k, w_k)`.
void replay(const WalkSpec& spec, std::uint64_t seed, std::size_t n,
            const std::function<void(std::size_t, std::span<const Letter>)>& visit);

/// Position after n steps (tree model).
Word position_at(const WalkSpec& spec, std::uint64_t seed, std::size_t n);

}  // namespace hyperwind
