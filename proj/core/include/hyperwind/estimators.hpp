#pragma once

// Estimators for the escape rate, the drift e = E(mu_ab)/lambda and the
// limit covariance A (a formula route through the recentred martingale and a
// route through ray windings), and the non-degeneracy certificate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperwind/dataset.hpp"
#include "hyperwind/measure.hpp"

namespace hyperwind {

struct AbelianMoments {
  std::size_t dim = 0;
  std::vector<double> mean;
  /// Row-major covariance.
  std::vector<double> covariance;
  double determinant = 0.0;
  bool exact = false;
  std::vector<Rational> mean_exact;
  std::vector<Rational> covariance_exact;
  std::optional<Rational> determinant_exact;
};

AbelianMoments exact_abelian_moments(const StepMeasure& mu, const Projection& pi);

struct DriftEstimate {
  double lambda = 0.0;
  double se = 0.0;
  std::uint64_t n = 0;
  std::size_t paths = 0;
  double slope = 0.0;
  double slope_se = 0.0;
  bool disagreement = false;
  std::vector<double> drift;
  std::vector<double> drift_se;
};

/// Mean of t_n/n over paths, with a slope fit over the second half of the
/// checkpoints as a cross-estimate. `abelian_mean` gives e = mean / lambda.
DriftEstimate estimate_lambda(const Dataset& data, std::span<const double> abelian_mean,
                              std::uint64_t min_horizon = 1000);

struct CovarianceEstimate {
  std::size_t dim = 0;
  std::vector<double> matrix;
  std::vector<double> se;
  std::size_t samples = 0;
  std::vector<double> eigenvalues;
  /// Delta-method standard error of the smallest eigenvalue.
  double min_eigenvalue_se = 0.0;
  double symmetry_error = 0.0;
  bool psd = false;
};

struct FormulaRoute {
  std::uint64_t n = 0;
  /// One estimate per reference point.
  std::vector<CovarianceEstimate> per_reference;
  /// Average over reference points.
  CovarianceEstimate combined;
  double max_pairwise_distance = 0.0;
  double spread_tolerance = 0.0;
  bool uniformity_violation = false;
  /// Estimates at n/4, n/2, n agree entrywise within 3 joint SE.
  std::vector<std::uint64_t> stability_n;
  bool stable = false;
};

/// (1 / (n lambda)) * mean over paths of M M^T, M = pi(w_n) - h_x(w_n . o) e,
/// for every reference point x recorded in the dataset.
CovarianceEstimate estimate_Anu_formula(const Dataset& data, std::size_t ref, std::uint64_t n,
                                        std::span<const double> drift, double lambda);
FormulaRoute estimate_Anu_formula_all(const Dataset& data, std::uint64_t n, std::span<const double> drift,
                                      double lambda);

/// Sample covariance of (i(r(t)) - t e)/sqrt(t) at ray time index `time_index`.
CovarianceEstimate estimate_Anu_empirical(const Dataset& data, std::size_t time_index, std::span<const double> drift);

struct RouteAgreement {
  double max_z = 0.0;
  bool agree = false;
};
/// Entrywise |a - b| <= 3 sqrt(se_a^2 + se_b^2).
RouteAgreement compare_routes(const CovarianceEstimate& a, const CovarianceEstimate& b, double multiplier = 3.0);

enum class Verdict { nondegenerate, inconclusive };

struct WitnessRow {
  Word element;
  AbelianVector image;
  double stable_length = 0.0;
};

struct NondegeneracyCertificate {
  Verdict verdict = Verdict::inconclusive;
  std::size_t dim = 0;
  std::size_t rank = 0;
  std::size_t products = 0;
  double residual = 0.0;
  double threshold = 0.0;
  /// Least-squares phi over all products.
  std::vector<double> phi;
  /// The system written on the support atoms alone, with its own residual.
  std::vector<WitnessRow> witness;
  double witness_residual = 0.0;
  bool elementary = false;
  std::string note;
};

/// Tree model when `model` is null; the plane model uses translation lengths
/// and the looser residual threshold.
NondegeneracyCertificate nondegeneracy_certificate(const StepMeasure& mu, const Projection& pi,
                                                   std::size_t search_length,
                                                   const plane::SchottkyModel* model = nullptr);

std::string to_string(Verdict v);

}  // namespace hyperwind
