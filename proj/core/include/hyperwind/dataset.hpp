#pragma once

// Batches of seeded paths, merged moment accumulators and the calibration
// run that fixes the escape-rate reference before the main run.

#include <cstdint>
#include <span>
#include <vector>

#include "hyperwind/walk.hpp"

namespace hyperwind {

/// Running mean and co-moment matrix; merges are associative up to rounding
/// (Chan et al. pairwise update).
class MomentAccumulator {
 public:
  MomentAccumulator() = default;
  explicit MomentAccumulator(std::size_t dim) : dim_(dim), mean_(dim, 0.0), m2_(dim * dim, 0.0) {}

  void add(std::span<const double> x);
  void merge(const MomentAccumulator& other);

  std::size_t dim() const { return dim_; }
  std::uint64_t count() const { return count_; }
  const std::vector<double>& mean() const { return mean_; }
  /// Unbiased sample covariance, row-major.
  std::vector<double> covariance() const;
  double variance(std::size_t i = 0) const;
  /// Standard error of the mean of coordinate i.
  double standard_error(std::size_t i = 0) const;

  friend bool operator==(const MomentAccumulator&, const MomentAccumulator&) = default;

 private:
  std::size_t dim_ = 0;
  std::uint64_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

struct Calibration {
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  std::size_t horizon = 0;
  double lambda = 0.0;
  double lambda_se = 0.0;
  /// Escape rate defining the stopping levels s * lambda_ref: the exact rate
  /// when one is known, else the calibrated one.
  double lambda_ref = 0.0;
  /// Per-step spread of t_k: sd(t_n) / sqrt(n).
  double sigma = 0.0;
  /// lambda^-1 E(mu_ab) with the exact mean.
  std::vector<double> drift;
  /// 95th percentile of |tau_s - s| / sqrt(s) at the calibration threshold.
  double time_control_R = 0.0;
  /// 95th percentile of max tracking / log n at the calibration horizon.
  double tracking_D = 0.0;
};

struct Dataset {
  std::uint64_t master_seed = 0;
  std::vector<PathRecord> paths;
  /// t_n / n at the horizon.
  MomentAccumulator escape{1};
  /// pi(w_n) / sqrt(n) at the horizon.
  MomentAccumulator winding;
};

/// Runs `paths` independent paths with seeds mix_seed(master_seed, i).
/// The result does not depend on `workers`; failures surface as PathError.
Dataset batch_run(const WalkSpec& spec, const ObservationPlan& plan, std::uint64_t master_seed, std::size_t paths,
                  std::size_t workers = 1);

/// Recomputes the merged accumulators of a dataset in path order.
void accumulate(Dataset& data);

/// Default worker count: HYPERWIND_WORKERS if set, else hardware concurrency.
std::size_t default_workers();

}  // namespace hyperwind
