#include "hyperwind/estimators.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hyperwind/error.hpp"
#include "hyperwind/martingale.hpp"
#include "hyperwind/stats.hpp"

namespace hyperwind {

namespace {

std::optional<Rational> rational_determinant(std::vector<Rational> m, std::size_t d) {
  Rational det(1);
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t pivot = c;
    while (pivot < d && m[pivot * d + c] == Rational(0)) ++pivot;
    if (pivot == d) return Rational(0);
    if (pivot != c) {
      for (std::size_t j = 0; j < d; ++j) std::swap(m[c * d + j], m[pivot * d + j]);
      det = -det;
    }
    det *= m[c * d + c];
    for (std::size_t r = c + 1; r < d; ++r) {
      const Rational f = m[r * d + c] / m[c * d + c];
      for (std::size_t j = c; j < d; ++j) m[r * d + j] -= f * m[c * d + j];
    }
  }
  return det;
}

/// Per-path d x d samples reduced to a covariance estimate.
CovarianceEstimate summarize(const std::vector<std::vector<double>>& products, std::size_t d, double scale) {
  CovarianceEstimate est;
  est.dim = d;
  est.samples = products.size();
  MomentAccumulator acc(d * d);
  std::vector<double> row(d * d);
  for (const auto& p : products) {
    for (std::size_t i = 0; i < d * d; ++i) row[i] = p[i] * scale;
    acc.add(row);
  }
  est.matrix = acc.mean();
  for (std::size_t i = 0; i < d * d; ++i) est.se.push_back(acc.standard_error(i));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      est.symmetry_error = std::max(est.symmetry_error, std::fabs(est.matrix[i * d + j] - est.matrix[j * d + i]));
  est.eigenvalues = symmetric_eigenvalues(est.matrix, d);
  est.psd = est.eigenvalues.front() >= -1e-9;
  return est;
}

/// Delta-method SE of the smallest eigenvalue from per-path outer products
/// of the vectors `xs` (already centred as required).
double min_eigen_se(const std::vector<Eigen::VectorXd>& xs, const CovarianceEstimate& est, double scale) {
  const auto d = static_cast<Eigen::Index>(est.dim);
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = est.matrix[static_cast<std::size_t>(i * d + j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  const Eigen::VectorXd v = solver.eigenvectors().col(0);
  MomentAccumulator acc(1);
  for (const auto& x : xs) {
    const double q = v.dot(x) * v.dot(x) * scale;
    acc.add(std::span(&q, 1));
  }
  return acc.standard_error();
}

}  // namespace

AbelianMoments exact_abelian_moments(const StepMeasure& mu, const Projection& pi) {
  AbelianMoments m;
  const std::size_t d = pi.dim;
  m.dim = d;
  std::vector<AbelianVector> images;
  for (const auto& a : mu.atoms()) images.push_back(abelianize(a.word, pi));
  m.mean.assign(d, 0.0);
  m.covariance.assign(d * d, 0.0);
  for (std::size_t k = 0; k < images.size(); ++k)
    for (std::size_t i = 0; i < d; ++i) m.mean[i] += mu.atoms()[k].probability * static_cast<double>(images[k][i]);
  for (std::size_t k = 0; k < images.size(); ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        m.covariance[i * d + j] += mu.atoms()[k].probability * (static_cast<double>(images[k][i]) - m.mean[i]) *
                                   (static_cast<double>(images[k][j]) - m.mean[j]);
  if (d > 0) {
    const auto ev = symmetric_eigenvalues(m.covariance, d);
    m.determinant = 1.0;
    for (double e : ev) m.determinant *= e;
  }
  if (mu.exact()) {
    m.exact = true;
    m.mean_exact.assign(d, Rational(0));
    m.covariance_exact.assign(d * d, Rational(0));
    for (std::size_t k = 0; k < images.size(); ++k)
      for (std::size_t i = 0; i < d; ++i) m.mean_exact[i] += *mu.atoms()[k].exact * Rational(images[k][i]);
    for (std::size_t k = 0; k < images.size(); ++k)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          m.covariance_exact[i * d + j] += *mu.atoms()[k].exact * (Rational(images[k][i]) - m.mean_exact[i]) *
                                           (Rational(images[k][j]) - m.mean_exact[j]);
    for (std::size_t i = 0; i < d; ++i) m.mean[i] = boost::rational_cast<double>(m.mean_exact[i]);
    for (std::size_t i = 0; i < d * d; ++i) m.covariance[i] = boost::rational_cast<double>(m.covariance_exact[i]);
    m.determinant_exact = rational_determinant(m.covariance_exact, d);
    m.determinant = boost::rational_cast<double>(*m.determinant_exact);
  }
  return m;
}

DriftEstimate estimate_lambda(const Dataset& data, std::span<const double> abelian_mean, std::uint64_t min_horizon) {
  if (data.paths.empty()) throw DomainError("empty dataset");
  DriftEstimate est;
  est.n = data.paths.front().horizon;
  est.paths = data.paths.size();
  if (est.n < min_horizon) throw DomainError("escape-rate estimate needs a horizon of at least " + std::to_string(min_horizon));
  MomentAccumulator rate(1), slope(1);
  for (const auto& p : data.paths) {
    const double r = p.t.back() / static_cast<double>(p.horizon);
    rate.add(std::span(&r, 1));
    std::vector<double> ks, ts;
    for (std::size_t c = 0; c < p.steps.size(); ++c)
      if (2 * p.steps[c] >= p.horizon) {
        ks.push_back(static_cast<double>(p.steps[c]));
        ts.push_back(p.t[c]);
      }
    if (ks.size() >= 2) {
      const double s = linear_fit(ks, ts).slope;
      slope.add(std::span(&s, 1));
    }
  }
  est.lambda = rate.mean()[0];
  est.se = rate.standard_error();
  if (!(est.lambda > 0.0)) throw DomainError("non-positive escape rate for a non-elementary measure");
  if (slope.count() > 0) {
    est.slope = slope.mean()[0];
    est.slope_se = slope.standard_error();
    est.disagreement = std::fabs(est.slope - est.lambda) > 3.0 * std::hypot(est.se, est.slope_se);
  }
  for (double m : abelian_mean) {
    est.drift.push_back(m / est.lambda);
    est.drift_se.push_back(std::fabs(m) * est.se / (est.lambda * est.lambda));
  }
  return est;
}

CovarianceEstimate estimate_Anu_formula(const Dataset& data, std::size_t ref, std::uint64_t n,
                                        std::span<const double> drift, double lambda) {
  if (data.paths.empty()) throw DomainError("empty dataset");
  if (!(lambda > 0.0)) throw DomainError("formula route needs a positive escape rate");
  const std::size_t d = data.paths.front().dim;
  const auto c = data.paths.front().checkpoint_index(n);
  if (!c) throw DomainError("formula route needs a checkpoint at n = " + std::to_string(n));
  std::vector<std::vector<double>> products;
  std::vector<Eigen::VectorXd> xs;
  const bool centred = std::all_of(drift.begin(), drift.end(), [](double v) { return v == 0.0; });
  for (const auto& p : data.paths) {
    const auto w = p.winding_at(*c);
    const double h = centred ? 0.0 : p.busemann_at(*c)[ref];
    Eigen::VectorXd m(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(j)) = static_cast<double>(w[j]) - h * drift[j];
    std::vector<double> outer(d * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        outer[i * d + j] = m(static_cast<Eigen::Index>(i)) * m(static_cast<Eigen::Index>(j));
    products.push_back(std::move(outer));
    xs.push_back(m);
  }
  const double scale = 1.0 / (static_cast<double>(n) * lambda);
  auto est = summarize(products, d, scale);
  est.min_eigenvalue_se = min_eigen_se(xs, est, scale);
  return est;
}

RouteAgreement compare_routes(const CovarianceEstimate& a, const CovarianceEstimate& b, double multiplier) {
  RouteAgreement r;
  for (std::size_t i = 0; i < a.matrix.size(); ++i) {
    const double se = std::hypot(a.se[i], b.se[i]);
    const double diff = std::fabs(a.matrix[i] - b.matrix[i]);
    if (se > 0.0)
      r.max_z = std::max(r.max_z, diff / se);
    else if (diff > 1e-12)
      r.max_z = std::numeric_limits<double>::infinity();
  }
  r.agree = r.max_z <= multiplier;
  return r;
}

FormulaRoute estimate_Anu_formula_all(const Dataset& data, std::uint64_t n, std::span<const double> drift,
                                      double lambda) {
  if (data.paths.empty()) throw DomainError("empty dataset");
  FormulaRoute route;
  route.n = n;
  const std::size_t refs = std::max<std::size_t>(1, data.paths.front().refs);
  for (std::size_t x = 0; x < refs; ++x) route.per_reference.push_back(estimate_Anu_formula(data, x, n, drift, lambda));
  const std::size_t d = route.per_reference.front().dim;
  auto& comb = route.combined;
  comb = route.per_reference.front();
  std::fill(comb.matrix.begin(), comb.matrix.end(), 0.0);
  std::fill(comb.se.begin(), comb.se.end(), 0.0);
  comb.min_eigenvalue_se = 0.0;
  for (const auto& e : route.per_reference) {
    for (std::size_t i = 0; i < d * d; ++i) {
      comb.matrix[i] += e.matrix[i] / static_cast<double>(refs);
      // Averages of strongly correlated estimates: keep the mean SE.
      comb.se[i] += e.se[i] / static_cast<double>(refs);
    }
    comb.min_eigenvalue_se += e.min_eigenvalue_se / static_cast<double>(refs);
  }
  comb.eigenvalues = symmetric_eigenvalues(comb.matrix, d);
  comb.psd = comb.eigenvalues.front() >= -1e-9;
  comb.symmetry_error = 0.0;

  for (std::size_t a = 0; a < refs; ++a)
    for (std::size_t b = a + 1; b < refs; ++b) {
      double dist2 = 0.0, se2 = 0.0;
      for (std::size_t i = 0; i < d * d; ++i) {
        const double diff = route.per_reference[a].matrix[i] - route.per_reference[b].matrix[i];
        dist2 += diff * diff;
        se2 += route.per_reference[a].se[i] * route.per_reference[a].se[i] +
               route.per_reference[b].se[i] * route.per_reference[b].se[i];
      }
      if (std::sqrt(dist2) > route.max_pairwise_distance) {
        route.max_pairwise_distance = std::sqrt(dist2);
        route.spread_tolerance = 3.0 * std::sqrt(se2);
      }
    }
  if (refs == 1) route.spread_tolerance = 0.0;
  route.uniformity_violation = route.max_pairwise_distance > route.spread_tolerance && refs > 1;

  route.stable = true;
  const CovarianceEstimate* prev = nullptr;
  std::vector<CovarianceEstimate> chain;
  for (std::uint64_t m : {n / 4, n / 2}) {
    if (!data.paths.front().checkpoint_index(m)) continue;
    route.stability_n.push_back(m);
    chain.push_back(estimate_Anu_formula(data, 0, m, drift, lambda));
  }
  route.stability_n.push_back(n);
  chain.push_back(route.per_reference.front());
  for (const auto& e : chain) {
    if (prev && !compare_routes(*prev, e).agree) route.stable = false;
    prev = &e;
  }
  return route;
}

CovarianceEstimate estimate_Anu_empirical(const Dataset& data, std::size_t time_index, std::span<const double> drift) {
  if (data.paths.empty() || time_index >= data.paths.front().ray_times.size())
    throw DomainError("ray route needs recorded ray windings");
  const std::size_t d = data.paths.front().dim;
  const double t = data.paths.front().ray_times[time_index];
  std::vector<Eigen::VectorXd> xs;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (const auto& p : data.paths) {
    const auto w = p.ray_winding_at(time_index);
    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j)
      x(static_cast<Eigen::Index>(j)) = (static_cast<double>(w[j]) - t * drift[j]) / std::sqrt(t);
    xs.push_back(x);
    mean += x;
  }
  mean /= static_cast<double>(xs.size());
  std::vector<std::vector<double>> products;
  for (auto& x : xs) {
    x -= mean;
    std::vector<double> outer(d * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) outer[i * d + j] = x(static_cast<Eigen::Index>(i)) * x(static_cast<Eigen::Index>(j));
    products.push_back(std::move(outer));
  }
  const double n = static_cast<double>(xs.size());
  auto est = summarize(products, d, n / (n - 1.0));
  est.min_eigenvalue_se = min_eigen_se(xs, est, n / (n - 1.0));
  return est;
}

NondegeneracyCertificate nondegeneracy_certificate(const StepMeasure& mu, const Projection& pi,
                                                   std::size_t search_length, const plane::SchottkyModel* model) {
  NondegeneracyCertificate cert;
  const std::size_t d = pi.dim;
  cert.dim = d;
  cert.threshold = model ? 1e-4 : 1e-6;

  auto length_of = [&](const Word& w) {
    return model ? (w.empty() ? 0.0 : [&] {
      const auto g = model->evaluate(w);
      return std::abs(g.trace()) > 2.0 + 1e-9 ? plane::translation_length(g) : 0.0;
    }())
                 : static_cast<double>(stable_length(w));
  };
  auto solve = [&](const std::vector<WitnessRow>& rows, std::vector<double>* phi) {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t j = 0; j < d; ++j)
        A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = static_cast<double>(rows[r].image[j]);
      b(static_cast<Eigen::Index>(r)) = rows[r].stable_length;
    }
    const Eigen::VectorXd x = A.completeOrthogonalDecomposition().solve(b);
    if (phi) phi->assign(x.data(), x.data() + x.size());
    return (A * x - b).cwiseAbs().maxCoeff();
  };

  Eigen::MatrixXd support(static_cast<Eigen::Index>(mu.size()), static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const auto img = abelianize(mu.atoms()[k].word, pi);
    for (std::size_t j = 0; j < d; ++j)
      support(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = static_cast<double>(img[j]);
    cert.witness.push_back({mu.atoms()[k].word, img, length_of(mu.atoms()[k].word)});
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(support);
  cert.rank = static_cast<std::size_t>(lu.rank());
  cert.witness_residual = solve(cert.witness, nullptr);

  std::vector<WitnessRow> rows;
  for (const auto& w : semigroup_products(mu, search_length)) rows.push_back({w, abelianize(w, pi), length_of(w)});
  cert.products = rows.size();
  cert.residual = solve(rows, &cert.phi);

  cert.elementary = !validate_measure(mu, model, 4).certified;
  if (cert.elementary) {
    cert.verdict = Verdict::inconclusive;
    cert.note = "measure is elementary; the criterion does not apply";
  } else if (cert.rank < d) {
    cert.verdict = Verdict::inconclusive;
    cert.note = "abelian images of the support do not span";
  } else if (cert.residual > cert.threshold) {
    cert.verdict = Verdict::nondegenerate;
    cert.note = "no linear phi matches stable lengths on the semigroup";
  } else {
    cert.verdict = Verdict::inconclusive;
    cert.note = "stable lengths are linear in the abelian image on all products searched";
  }
  return cert;
}

std::string to_string(Verdict v) { return v == Verdict::nondegenerate ? "NONDEGENERATE" : "INCONCLUSIVE"; }

}  // namespace hyperwind
