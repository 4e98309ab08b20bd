#include "hyperwind/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "hyperwind/error.hpp"
#include "hyperwind/rng.hpp"

namespace hyperwind {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("linear fit needs paired data");
  LinearFit fit;
  fit.points = x.size();
  if (x.size() < 2) return fit;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("KS statistic of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }

namespace {

using Matrix = Eigen::MatrixXd;

Matrix to_matrix(std::span<const double> a, std::size_t d) {
  if (a.size() != d * d) throw DomainError("matrix has the wrong size");
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = a[i * d + j];
  return 0.5 * (m + m.transpose());
}

std::vector<double> from_matrix(const Matrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  return out;
}

struct Spectrum {
  Eigen::VectorXd values;
  Matrix vectors;
};

Spectrum spectrum(std::span<const double> a, std::size_t d) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(to_matrix(a, d));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// Null directions of a covariance: eigenvalues below 1e-9 of the largest.
std::vector<Eigen::VectorXd> null_directions(const Spectrum& s) {
  std::vector<Eigen::VectorXd> out;
  const double top = std::max(0.0, s.values.maxCoeff());
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    if (s.values(i) <= 1e-9 * std::max(top, 1e-300) || s.values(i) <= 1e-12) out.push_back(s.vectors.col(i));
  return out;
}

std::size_t time_index_of(const Dataset& data, std::size_t i) {
  if (data.paths.empty()) throw DomainError("empty dataset");
  if (i >= data.paths.front().ray_times.size()) throw DomainError("ray time index out of range");
  return i;
}

struct WhitenedSamples {
  std::vector<std::vector<double>> marginals;
  Matrix covariance;
};

/// Applies S to each row and returns marginals plus their sample covariance.
WhitenedSamples whiten(const std::vector<Eigen::VectorXd>& rows, const Matrix& S) {
  const auto d = static_cast<std::size_t>(S.rows());
  WhitenedSamples out;
  out.marginals.assign(d, {});
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(S.rows());
  std::vector<Eigen::VectorXd> z;
  z.reserve(rows.size());
  for (const auto& r : rows) {
    z.push_back(S * r);
    mean += z.back();
  }
  mean /= static_cast<double>(rows.size());
  out.covariance = Matrix::Zero(S.rows(), S.rows());
  for (const auto& v : z) {
    for (std::size_t j = 0; j < d; ++j) out.marginals[j].push_back(v(static_cast<Eigen::Index>(j)));
    out.covariance += (v - mean) * (v - mean).transpose();
  }
  out.covariance /= static_cast<double>(rows.size() > 1 ? rows.size() - 1 : 1);
  return out;
}

/// Shared core of the two CLT tests.
void gaussian_check(TestReport& r, const std::vector<Eigen::VectorXd>& raw, const std::vector<Eigen::VectorXd>& jittered,
                    std::span<const double> covariance, std::size_t d, const CltOptions& opt) {
  const Spectrum s = spectrum(covariance, d);
  const auto nulls = null_directions(s);
  r.samples = raw.size();
  if (!nulls.empty()) {
    double spread = 0.0;
    for (const auto& v : nulls) {
      double m = 0.0, m2 = 0.0;
      for (const auto& x : raw) {
        const double p = v.dot(x);
        m += p;
        m2 += p * p;
      }
      m /= static_cast<double>(raw.size());
      spread = std::max(spread, m2 / static_cast<double>(raw.size()) - m * m);
    }
    r.add("null_direction_variance", {spread});
    if (spread > 1e-9)
      throw DomainError("covariance estimate is singular but the data vary in its null directions");
    r.degenerate = true;
    r.pass = true;
    r.note = "degenerate covariance: samples collapse onto its range; Gaussian check skipped";
    return;
  }
  Matrix S = to_matrix(inverse_sqrt(covariance, d), d);
  const auto w = whiten(opt.jitter ? jittered : raw, S);
  const double alpha = opt.alpha / static_cast<double>(d);
  const double threshold = ks_critical(alpha) / std::sqrt(static_cast<double>(raw.size()));
  std::vector<double> ks;
  for (const auto& m : w.marginals) ks.push_back(ks_statistic(m, normal_cdf));
  const double frob = (w.covariance - Matrix::Identity(S.rows(), S.cols())).norm();
  r.statistic_name = "max marginal KS";
  r.statistic = *std::max_element(ks.begin(), ks.end());
  r.threshold = threshold;
  r.add("ks", ks);
  r.add("whitened_covariance", from_matrix(w.covariance));
  r.add("covariance_frobenius_error", {frob, opt.covariance_tolerance});
  for (std::size_t j = 0; j < w.marginals.size() && j < 4; ++j) r.add("whitened_" + std::to_string(j), w.marginals[j]);
  r.pass = r.statistic < threshold && frob < opt.covariance_tolerance;
}

}  // namespace

std::vector<double> inverse_sqrt(std::span<const double> a, std::size_t d) {
  const Spectrum s = spectrum(a, d);
  if (s.values.minCoeff() <= 0.0) throw DomainError("whitening needs a positive definite matrix");
  const Matrix inv = s.vectors * s.values.cwiseSqrt().cwiseInverse().asDiagonal() * s.vectors.transpose();
  return from_matrix(inv);
}

std::vector<double> symmetric_eigenvalues(std::span<const double> a, std::size_t d) {
  const Spectrum s = spectrum(a, d);
  return {s.values.data(), s.values.data() + s.values.size()};
}

const std::vector<double>* TestReport::detail(const std::string& key) const {
  for (const auto& d : details)
    if (d.key == key) return &d.values;
  return nullptr;
}

double lattice_jitter(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
  CounterStream stream(seed, Stream::jitter);
  const std::uint64_t base = 4 * (i * 64 + j);
  const std::uint64_t bits = (std::uint64_t{stream.at(base)} << 32) | stream.at(base + 1);
  return static_cast<double>(bits >> 11) * 0x1.0p-53 - 0.5;
}

TestReport lln_test(const Dataset& data, std::span<const double> drift, std::span<const double> drift_se,
                    const LlnOptions& opt) {
  TestReport r;
  r.name = "lln";
  r.statistic_name = "|mean i(r(t))/t - e| at the last ray time";
  r.seed = data.master_seed;
  if (data.paths.empty() || data.paths.front().ray_times.empty()) throw DomainError("LLN test needs ray windings");
  const auto& times = data.paths.front().ray_times;
  const std::size_t d = data.paths.front().dim;
  std::vector<double> devs, ses, ts;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    if (t <= 0.0) continue;
    MomentAccumulator acc(d);
    std::vector<double> x(d);
    for (const auto& p : data.paths) {
      const auto w = p.ray_winding_at(ti);
      for (std::size_t j = 0; j < d; ++j) x[j] = static_cast<double>(w[j]) / t;
      acc.add(x);
    }
    double dev2 = 0.0, se2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = acc.mean()[j] - drift[j];
      dev2 += diff * diff;
      const double es = j < drift_se.size() ? drift_se[j] : 0.0;
      se2 += acc.standard_error(j) * acc.standard_error(j) + es * es;
    }
    ts.push_back(t);
    devs.push_back(std::sqrt(dev2));
    ses.push_back(std::sqrt(se2));
  }
  r.samples = data.paths.size();
  r.statistic = devs.back();
  r.threshold = opt.abs_tolerance;
  std::vector<double> lt, ld;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (devs[i] > 0.0) {
      lt.push_back(std::log(ts[i]));
      ld.push_back(std::log(devs[i]));
    }
  const bool exact = std::all_of(devs.begin(), devs.end(), [](double v) { return v < 1e-12; });
  const LinearFit trend = linear_fit(lt, ld);
  const bool decreasing = exact || (lt.size() >= 2 && trend.slope < 0.0);
  const bool within_se = exact || devs.back() < opt.se_multiplier * ses.back();
  r.add("times", ts);
  r.add("deviation", devs);
  r.add("se", ses);
  r.add("trend_slope", {trend.slope});
  r.add("within_se", {within_se ? 1.0 : 0.0});
  r.pass = devs.back() < opt.abs_tolerance && within_se && decreasing;
  if (!decreasing) r.note = "deviation does not decrease in t";
  return r;
}

TestReport clt_test(const Dataset& data, std::span<const double> drift, std::span<const double> covariance,
                    std::size_t time_index, const CltOptions& opt) {
  TestReport r;
  r.name = "clt";
  r.seed = data.master_seed;
  const std::size_t ti = time_index_of(data, time_index);
  const std::size_t d = data.paths.front().dim;
  const double t = data.paths.front().ray_times[ti];
  std::vector<Eigen::VectorXd> raw, jit;
  for (const auto& p : data.paths) {
    const auto w = p.ray_winding_at(ti);
    Eigen::VectorXd x(d), y(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double centred = static_cast<double>(w[j]) - t * drift[j];
      x(static_cast<Eigen::Index>(j)) = centred / std::sqrt(t);
      y(static_cast<Eigen::Index>(j)) = (centred + lattice_jitter(data.master_seed, p.index, j)) / std::sqrt(t);
    }
    raw.push_back(x);
    jit.push_back(y);
  }
  r.add("time", {t});
  gaussian_check(r, raw, jit, covariance, d, opt);
  return r;
}

TestReport clt_stopped_test(const Dataset& data, std::span<const double> drift, std::span<const double> covariance,
                            double lambda_ref, std::size_t threshold_index, const StoppedCltOptions& opt) {
  TestReport r;
  r.name = "clt_stopped";
  r.seed = data.master_seed;
  if (data.paths.empty() || threshold_index >= data.paths.front().stopping.size())
    throw DomainError("stopped CLT needs recorded stopping hits");
  const std::size_t d = data.paths.front().dim;
  const double s = data.paths.front().stopping[threshold_index].threshold;
  std::vector<Eigen::VectorXd> raw, jit;
  std::size_t censored = 0;
  for (const auto& p : data.paths) {
    const auto& hit = p.stopping[threshold_index];
    if (hit.tau == kCensored) {
      ++censored;
      continue;
    }
    Eigen::VectorXd x(d), y(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double centred = static_cast<double>(hit.winding[j]) - s * lambda_ref * drift[j];
      x(static_cast<Eigen::Index>(j)) = centred / std::sqrt(s);
      y(static_cast<Eigen::Index>(j)) = (centred + lattice_jitter(data.master_seed, p.index, 16 + j)) / std::sqrt(s);
    }
    raw.push_back(x);
    jit.push_back(y);
  }
  const double censored_fraction = static_cast<double>(censored) / static_cast<double>(data.paths.size());
  r.add("threshold", {s});
  r.add("censored_fraction", {censored_fraction, opt.max_censored});
  if (censored_fraction > opt.max_censored || raw.size() < 2) {
    r.pass = false;
    r.samples = raw.size();
    r.note = "censoring: stopping threshold not reached by the horizon on too many paths";
    return r;
  }
  std::vector<double> scaled(covariance.begin(), covariance.end());
  for (double& v : scaled) v *= lambda_ref;
  // Covariance of the stopped windings, rescaled back to the ray normalization.
  {
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (const auto& x : raw) m += x;
    m /= static_cast<double>(raw.size());
    for (const auto& x : raw) c += (x - m) * (x - m).transpose();
    c /= static_cast<double>(raw.size() - 1) * lambda_ref;
    r.add("limit_covariance", from_matrix(c));
  }
  gaussian_check(r, raw, jit, scaled, d, opt.clt);
  return r;
}

TestReport lil_test(const Dataset& data, std::span<const double> drift, std::span<const double> covariance,
                    const LilOptions& opt) {
  TestReport r;
  r.name = "lil";
  r.proxy = true;
  r.statistic_name = "median over paths of max_t |A^-1/2 (i(r(t)) - t e)| / sqrt(2 t log log t)";
  r.seed = data.master_seed;
  r.samples = data.paths.size();
  r.threshold = opt.band_high;
  r.note = "finite-time proxy for the accumulation-set statement";
  if (data.paths.size() < 100) {
    r.note = "needs at least 100 paths";
    return r;
  }
  const auto& times = data.paths.front().ray_times;
  const std::size_t d = data.paths.front().dim;
  const Spectrum s = spectrum(covariance, d);
  if (s.values.maxCoeff() <= 1e-12) {
    r.degenerate = true;
    r.pass = true;
    r.note = "degenerate covariance: statistic identically zero";
    return r;
  }
  const Matrix S = to_matrix(inverse_sqrt(covariance, d), d);
  std::vector<double> full, early;
  for (const auto& p : data.paths) {
    double m_full = 0.0, m_early = 0.0;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const double t = times[ti];
      if (t < opt.t0 || t <= std::exp(std::exp(1.0))) continue;
      const auto w = p.ray_winding_at(ti);
      Eigen::VectorXd x(d);
      for (std::size_t j = 0; j < d; ++j)
        x(static_cast<Eigen::Index>(j)) = static_cast<double>(w[j]) - t * drift[j];
      const double v = (S * x).norm() / std::sqrt(2.0 * t * std::log(std::log(t)));
      m_full = std::max(m_full, v);
      if (t <= opt.trend_horizon) m_early = std::max(m_early, v);
    }
    full.push_back(m_full);
    early.push_back(m_early);
  }
  const double med = median(full);
  const double med_early = median(early);
  const auto over = std::count_if(full.begin(), full.end(), [&](double v) { return v > opt.path_cap; });
  const double over_fraction = static_cast<double>(over) / static_cast<double>(full.size());
  r.statistic = med;
  r.add("band", {opt.band_low, opt.band_high});
  r.add("median_by_horizon", {opt.trend_horizon, med_early, times.back(), med});
  r.add("paths_over_cap", {opt.path_cap, over_fraction});
  r.add("statistic", full);
  const bool in_band = med >= opt.band_low && med <= opt.band_high;
  const bool trend = std::fabs(med - 1.0) < std::fabs(med_early - 1.0);
  r.pass = in_band && trend;
  if (over > 0)
    r.note += "; " + std::to_string(over) + " path(s) exceed " + std::to_string(opt.path_cap) + " (reported, not gated)";
  return r;
}

TestReport pld_test(const Dataset& data, std::span<const double> drift, const PldOptions& opt) {
  if (!(opt.alpha_dev > 0.0)) throw DomainError("deviation level alpha must be positive");
  TestReport r;
  r.name = "pld";
  r.statistic_name = "slope of log tail probability against t";
  r.seed = data.master_seed;
  r.samples = data.paths.size();
  if (data.paths.empty() || data.paths.front().ray_times.empty()) throw DomainError("PLD test needs ray windings");
  const auto& times = data.paths.front().ray_times;
  const std::size_t d = data.paths.front().dim;
  std::vector<double> probs, counts, ft, fy;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    std::size_t hits = 0;
    for (const auto& p : data.paths) {
      const auto w = p.ray_winding_at(ti);
      double n2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double c = static_cast<double>(w[j]) - t * drift[j];
        n2 += c * c;
      }
      if (std::sqrt(n2) >= opt.alpha_dev * t) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(data.paths.size());
    probs.push_back(p);
    counts.push_back(static_cast<double>(hits));
    if (hits > 0) {
      ft.push_back(t);
      fy.push_back(std::log(p));
    }
  }
  r.add("times", times);
  r.add("tail_probability", probs);
  r.add("counts", counts);
  r.add("alpha_dev", {opt.alpha_dev});
  if (ft.empty()) {
    r.vacuous = true;
    r.pass = true;
    r.note = "all tail cells empty: tail below resolution";
    return r;
  }
  const LinearFit fit = linear_fit(ft, fy);
  r.statistic = fit.slope;
  r.threshold = 0.0;
  r.add("fit", {fit.slope, fit.intercept, fit.r2, static_cast<double>(fit.points)});
  if (ft.size() < 3) {
    r.note = "fewer than three nonzero tail cells";
    r.pass = false;
    return r;
  }
  r.pass = fit.slope < 0.0 && fit.r2 > opt.min_r2;
  return r;
}

TestReport gr_test(const Dataset& data, double k, double l, std::span<const double> functional,
                   std::span<const double> covariance, const std::vector<ExitWindow>& recorded, const GrOptions& opt) {
  TestReport r;
  r.name = "gr";
  r.statistic_name = "|upper-exit frequency - k/(k+l)| at the largest s";
  r.seed = data.master_seed;
  r.samples = data.paths.size();
  const std::size_t d = functional.size();
  const Matrix A = to_matrix(covariance, d);
  Eigen::VectorXd f(d);
  for (std::size_t j = 0; j < d; ++j) f(static_cast<Eigen::Index>(j)) = functional[j];
  const double var = f.dot(A * f);
  if (!(var > 0.0)) throw DomainError("exit functional has zero variance under the covariance estimate");
  const double target = k / (k + l);
  std::vector<std::pair<double, std::size_t>> windows;
  for (std::size_t i = 0; i < recorded.size(); ++i)
    if (recorded[i].k == k && recorded[i].l == l) windows.emplace_back(recorded[i].s, i);
  std::sort(windows.begin(), windows.end());
  if (windows.empty()) throw DomainError("no recorded exit window with this (k, l)");
  std::vector<double> ss, freq, se, dev, cens;
  bool censor_ok = true;
  for (const auto& [s, idx] : windows) {
    std::size_t up = 0, exited = 0, censored = 0;
    for (const auto& p : data.paths) {
      const auto& e = p.ray_exits.at(idx);
      if (e.side == 0) {
        ++censored;
        continue;
      }
      ++exited;
      if (e.side > 0) ++up;
    }
    const double fr = exited ? static_cast<double>(up) / static_cast<double>(exited) : 0.0;
    ss.push_back(s);
    freq.push_back(fr);
    se.push_back(exited ? std::sqrt(fr * (1.0 - fr) / static_cast<double>(exited)) : 0.0);
    dev.push_back(std::fabs(fr - target));
    const double cf = static_cast<double>(censored) / static_cast<double>(data.paths.size());
    cens.push_back(cf);
    if (cf > opt.max_censored) censor_ok = false;
  }
  bool trend = true;
  for (std::size_t i = 1; i < dev.size(); ++i)
    if (dev[i] > dev[i - 1] + opt.trend_se_multiplier * std::hypot(se[i], se[i - 1])) trend = false;
  r.statistic = dev.back();
  r.threshold = opt.abs_tolerance + opt.se_multiplier * se.back();
  r.add("k_l_target", {k, l, target});
  r.add("s", ss);
  r.add("upper_frequency", freq);
  r.add("se", se);
  r.add("censored_fraction", cens);
  r.add("trend_ok", {trend ? 1.0 : 0.0});
  r.pass = censor_ok && r.statistic <= r.threshold && trend;
  if (!censor_ok) r.note = "censoring: more than the allowed fraction of paths never exit";
  else if (!trend) r.note = "deviation from k/(k+l) grows with s beyond noise";
  return r;
}

}  // namespace hyperwind
