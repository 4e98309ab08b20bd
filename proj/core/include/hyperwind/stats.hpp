#pragma once

// Statistical machinery and the limit-law tests. Every test is a pure
// function of a dataset and its parameters, so reruns reproduce reports
// bit for bit.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hyperwind/dataset.hpp"

namespace hyperwind {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Linear-interpolation quantile (type 7).
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);
double normal_cdf(double x);

/// sup |F_n - F| for the given continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// c(alpha) = sqrt(-log(alpha / 2) / 2), the asymptotic Kolmogorov critical value.
double ks_critical(double alpha);

/// A^{-1/2} for a symmetric positive definite A (row-major d x d), so that
/// S A S^T = I.
std::vector<double> inverse_sqrt(std::span<const double> a, std::size_t d);
/// Eigenvalues of a symmetric matrix, ascending.
std::vector<double> symmetric_eigenvalues(std::span<const double> a, std::size_t d);

struct Detail {
  std::string key;
  std::vector<double> values;
};

struct TestReport {
  std::string name;
  std::string statistic_name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool degenerate = false;
  bool vacuous = false;
  /// Finite-time stand-in for an asymptotic statement.
  bool proxy = false;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string dataset_digest;
  std::string note;
  std::vector<Detail> details;

  void add(std::string key, std::vector<double> values) { details.push_back({std::move(key), std::move(values)}); }
  const std::vector<double>* detail(const std::string& key) const;
};

struct LlnOptions {
  double abs_tolerance = 0.02;
  double se_multiplier = 3.0;
};
/// Mean of i(r(t))/t against the drift at every recorded ray time.
TestReport lln_test(const Dataset& data, std::span<const double> drift, std::span<const double> drift_se,
                    const LlnOptions& opt = {});

struct CltOptions {
  double alpha = 0.01;
  double covariance_tolerance = 0.1;
  /// Spread lattice-valued samples by U(-1/2, 1/2) before whitening.
  bool jitter = true;
};
/// Whitened (i(r(t)) - t e)/sqrt(t) at ray time index `time_index`, marginal KS.
TestReport clt_test(const Dataset& data, std::span<const double> drift, std::span<const double> covariance,
                    std::size_t time_index, const CltOptions& opt = {});

struct StoppedCltOptions {
  CltOptions clt;
  double max_censored = 0.01;
};
/// (pi(w_tau) - s lambda e)/sqrt(s) at threshold index `threshold_index`,
/// whitened by lambda * covariance.
TestReport clt_stopped_test(const Dataset& data, std::span<const double> drift, std::span<const double> covariance,
                            double lambda_ref, std::size_t threshold_index, const StoppedCltOptions& opt = {});

struct LilOptions {
  double t0 = 1000.0;
  double band_low = 0.6;
  double band_high = 1.3;
  double path_cap = 1.6;
  /// Earlier horizon for the trend check.
  double trend_horizon = 1e4;
};
/// Normalized sup statistic over the recorded ray times (>= t0), median band,
/// and the trend of the median towards 1 between the two horizons.
TestReport lil_test(const Dataset& data, std::span<const double> drift, std::span<const double> covariance,
                    const LilOptions& opt = {});

struct PldOptions {
  double alpha_dev = 0.3;
  double min_r2 = 0.9;
};
/// Empirical tail P(|i(r(t)) - t e| >= alpha t) at every ray time, with a
/// linear fit of log p against t over nonzero cells.
TestReport pld_test(const Dataset& data, std::span<const double> drift, const PldOptions& opt = {});

struct GrOptions {
  double abs_tolerance = 0.02;
  double se_multiplier = 2.0;
  double trend_se_multiplier = 2.0;
  double max_censored = 0.01;
};
/// Upper-exit frequency of the recentred projected ray through [-k s, l s],
/// against k/(k+l). `windows` are the recorded exit windows with this (k, l).
TestReport gr_test(const Dataset& data, double k, double l, std::span<const double> functional,
                   std::span<const double> covariance, const std::vector<ExitWindow>& recorded,
                   const GrOptions& opt = {});

/// Deterministic U(-1/2, 1/2) jitter for sample i, coordinate j.
double lattice_jitter(std::uint64_t seed, std::uint64_t i, std::uint64_t j);

}  // namespace hyperwind
