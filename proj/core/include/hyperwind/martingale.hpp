#pragma once

// The recentred winding martingale, the recentring function psi, and the
// stopping-time and exit diagnostics computed over a dataset.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperwind/dataset.hpp"
#include "hyperwind/stats.hpp"
#include "hyperwind/tree_boundary.hpp"
#include "hyperwind/walk.hpp"

namespace hyperwind {

/// M_k = pi(w_k) - h_x(w_k . o) e at each checkpoint, for the reference
/// point with index `ref` of the path's observation plan.
struct MartingaleSeries {
  std::size_t dim = 0;
  std::size_t ref = 0;
  std::vector<double> drift;
  std::vector<std::uint64_t> steps;
  /// steps.size() x dim.
  std::vector<double> values;

  std::span<const double> at(std::size_t i) const { return std::span(values).subspan(i * dim, dim); }
};

MartingaleSeries martingale_series(const PathRecord& path, std::size_t ref, std::span<const double> drift);

/// Largest |M_{k+1} - M_k| between consecutive checkpoints against the bound
/// (step gap) * L * (1 + |e|), L the longest support word.
struct IncrementReport {
  double max_increment = 0.0;
  double bound = 0.0;
  bool pass = false;
};
IncrementReport increment_check(const Dataset& data, std::size_t ref, std::span<const double> drift,
                                std::size_t max_word_length);

/// Mean increment of M over (step, step + gap], overall and given coarse
/// history bins (quantiles of the first coordinate of M at `step`). The
/// level of M itself carries a bounded offset from the unrecentred cocycle.
struct MartingaleMeanReport {
  std::vector<double> mean;
  std::vector<double> se;
  std::vector<double> bin_means;
  std::vector<double> bin_se;
  double max_z = 0.0;
  bool pass = false;
};
MartingaleMeanReport martingale_mean_check(const Dataset& data, std::size_t ref, std::span<const double> drift,
                                           std::uint64_t step, std::uint64_t gap, std::size_t bins = 4);

/// (1/n) mean over paths of the sum of dM dM^T over checkpoints up to n.
struct QuadraticVariation {
  std::size_t dim = 0;
  std::uint64_t n = 0;
  std::vector<double> matrix;
  std::vector<double> se;
};
QuadraticVariation quadratic_variation(const Dataset& data, std::size_t ref, std::span<const double> drift,
                                       std::uint64_t n);

/// Limit points of independent walks with seeds mix_seed(seed, i).
std::vector<BoundaryWord> boundary_sample_bank(const WalkSpec& spec, const StabilizationParams& params,
                                               std::size_t horizon, std::uint64_t seed, std::size_t count);

struct PsiEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
  /// Samples whose Gromov product with x reached the truncation cap.
  std::size_t truncated = 0;
  std::optional<std::string> warning;
};

inline constexpr std::size_t kPsiTruncation = 1000;

/// psi(x) = mean over the sample bank of (x | y). Refuses fewer than 100 samples.
PsiEstimate estimate_psi(const BoundaryWord& x, const std::vector<BoundaryWord>& samples);

/// Drift of the psi-recentred cocycle along inverse steps,
/// E[ sigma(g, x) - 2 (psi(g x) - psi(x)) ] for g ~ inverse step law. It is
/// constant in x; the raw cocycle drift is reported beside it.
struct PsiDriftReport {
  std::vector<double> raw_drift;
  std::vector<double> recentred_drift;
  std::vector<double> recentred_se;
  double raw_spread = 0.0;
  double recentred_spread = 0.0;
  double spread_tolerance = 0.0;
  bool pass = false;
};
PsiDriftReport psi_drift_check(const StepMeasure& mu, const std::vector<BoundaryWord>& xs,
                               const std::vector<BoundaryWord>& samples);

struct FosterRow {
  double s = 0.0;
  std::size_t hits = 0;
  double mean_tau = 0.0;
  double se = 0.0;
  bool pass = false;
};
struct FosterReport {
  std::vector<FosterRow> rows;
  bool monotone = false;
  bool pass = false;
};
/// Flags a threshold when the mean of tau_s exceeds s + 3 SE.
FosterReport foster_check(const Dataset& data);

struct OvershootRow {
  double s = 0.0;
  std::vector<double> values;
  double p99 = 0.0;
  double max = 0.0;
  double min = 0.0;
};
struct OvershootReport {
  std::vector<OvershootRow> rows;
  double p99_spread = 0.0;
  double band = 0.0;
  /// Tree model: every overshoot lies in [0, longest support word].
  std::optional<bool> exact_bound;
  bool pass = false;
};
OvershootReport overshoot_stats(const Dataset& data, double lambda_ref, double band,
                                std::optional<std::size_t> max_word_length);

struct TimeControlReport {
  double R = 0.0;
  std::vector<double> s;
  std::vector<double> fraction;
  double spread = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};
/// Fraction of paths with |tau_s - s| <= R sqrt(s) for each threshold.
TimeControlReport time_control_check(const Dataset& data, double R, double tolerance);

struct TrackingReport {
  double D = 0.0;
  std::uint64_t n = 0;
  double fraction_within = 0.0;
  double required_fraction = 0.95;
  std::vector<double> s;
  std::vector<LinearFit> tail_fits;
  double slope_spread = 0.0;
  double slope_tolerance = 0.25;
  bool bound_pass = false;
  bool tail_pass = false;
};
/// max tracking <= D log n on the required fraction of paths, and
/// exponential tails of the tracking distance at tau_s with stable slopes.
TrackingReport tracking_check(const Dataset& data, double D, double required_fraction, double slope_tolerance,
                              double min_r2);

struct XControlRow {
  std::size_t n = 0;
  std::vector<double> epsilon;
  std::vector<double> R;
};
struct XControlReport {
  std::vector<XControlRow> rows;
  bool monotone = false;
  bool stable = false;
};
/// |sigma(g, x) - sigma(g, y)| under g ~ mu^{*n}, summarized by the
/// (1 - epsilon)-quantile R(epsilon).
XControlReport x_control_check(const WalkSpec& spec, const std::vector<std::size_t>& n_list,
                               const std::vector<std::pair<BoundaryWord, BoundaryWord>>& pairs, std::size_t samples,
                               std::uint64_t seed, const std::vector<double>& epsilon = {0.1, 0.05, 0.01});

/// First exit of a scalar series (index = time) from the window.
ExitResult first_exit(std::span<const double> series, const ExitWindow& window);

struct ExitRow {
  ExitWindow window;
  std::size_t exited = 0;
  std::size_t censored = 0;
  double upper_frequency = 0.0;
  double se = 0.0;
  double target = 0.0;
};
/// Upper-exit frequencies over the recorded exits (ray or martingale).
std::vector<ExitRow> exit_statistics(const Dataset& data, const std::vector<ExitWindow>& windows, bool martingale);

}  // namespace hyperwind
