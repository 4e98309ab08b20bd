#include "hyperwind/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hyperwind/error.hpp"
#include "hyperwind/rng.hpp"

namespace hyperwind {

MartingaleSeries martingale_series(const PathRecord& path, std::size_t ref, std::span<const double> drift) {
  if (drift.size() != path.dim) throw DomainError("drift dimension does not match the path");
  const bool centred = std::all_of(drift.begin(), drift.end(), [](double v) { return v == 0.0; });
  if (!centred && ref >= path.refs) throw DomainError("reference point index out of range");
  MartingaleSeries m;
  m.dim = path.dim;
  m.ref = ref;
  m.drift.assign(drift.begin(), drift.end());
  m.steps = path.steps;
  m.values.reserve(path.steps.size() * path.dim);
  for (std::size_t c = 0; c < path.steps.size(); ++c) {
    const auto w = path.winding_at(c);
    const double h = centred ? 0.0 : path.busemann_at(c)[ref];
    for (std::size_t j = 0; j < path.dim; ++j) m.values.push_back(static_cast<double>(w[j]) - h * drift[j]);
  }
  return m;
}

IncrementReport increment_check(const Dataset& data, std::size_t ref, std::span<const double> drift,
                                std::size_t max_word_length) {
  IncrementReport r;
  double enorm = 0.0;
  for (double v : drift) enorm += v * v;
  enorm = std::sqrt(enorm);
  double worst_ratio = 0.0;
  for (const auto& p : data.paths) {
    const auto m = martingale_series(p, ref, drift);
    for (std::size_t c = 1; c < m.steps.size(); ++c) {
      double inc = 0.0;
      for (std::size_t j = 0; j < m.dim; ++j) inc = std::max(inc, std::fabs(m.at(c)[j] - m.at(c - 1)[j]));
      const double gap = static_cast<double>(m.steps[c] - m.steps[c - 1]);
      const double bound = gap * static_cast<double>(max_word_length) * (1.0 + enorm);
      r.max_increment = std::max(r.max_increment, inc);
      if (inc / bound > worst_ratio) {
        worst_ratio = inc / bound;
        r.bound = bound;
      }
    }
  }
  if (r.bound == 0.0) r.bound = static_cast<double>(max_word_length) * (1.0 + enorm);
  r.pass = worst_ratio <= 1.0 + 1e-12;
  return r;
}

MartingaleMeanReport martingale_mean_check(const Dataset& data, std::size_t ref, std::span<const double> drift,
                                           std::uint64_t step, std::uint64_t gap, std::size_t bins) {
  MartingaleMeanReport r;
  if (data.paths.empty()) throw DomainError("empty dataset");
  const auto& first = data.paths.front();
  const auto c0 = first.checkpoint_index(step);
  const auto c1 = first.checkpoint_index(step + gap);
  if (!c0 || !c1) throw DomainError("martingale check needs checkpoints at both steps");
  const std::size_t d = first.dim;
  MomentAccumulator level(d);
  std::vector<double> key;
  std::vector<double> inc;
  std::vector<double> delta(d);
  for (const auto& p : data.paths) {
    const auto m = martingale_series(p, ref, drift);
    for (std::size_t j = 0; j < d; ++j) delta[j] = m.at(*c1)[j] - m.at(*c0)[j];
    level.add(delta);
    key.push_back(m.at(*c0)[0]);
    inc.push_back(m.at(*c1)[0] - m.at(*c0)[0]);
  }
  r.mean = level.mean();
  for (std::size_t j = 0; j < d; ++j) {
    r.se.push_back(level.standard_error(j));
    if (r.se.back() > 0.0) r.max_z = std::max(r.max_z, std::fabs(r.mean[j]) / r.se.back());
  }
  // Coarse history bins: quantiles of the first coordinate at `step`.
  std::vector<double> edges;
  for (std::size_t b = 1; b < bins; ++b) edges.push_back(quantile(key, static_cast<double>(b) / static_cast<double>(bins)));
  std::vector<MomentAccumulator> acc(bins, MomentAccumulator(1));
  for (std::size_t i = 0; i < key.size(); ++i) {
    const auto b = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), key[i]) - edges.begin());
    acc[b].add(std::span(&inc[i], 1));
  }
  for (const auto& a : acc) {
    if (a.count() < 2) continue;
    r.bin_means.push_back(a.mean()[0]);
    r.bin_se.push_back(a.standard_error());
    if (a.standard_error() > 0.0) r.max_z = std::max(r.max_z, std::fabs(a.mean()[0]) / a.standard_error());
  }
  r.pass = r.max_z < 3.0;
  return r;
}

QuadraticVariation quadratic_variation(const Dataset& data, std::size_t ref, std::span<const double> drift,
                                       std::uint64_t n) {
  if (data.paths.empty()) throw DomainError("empty dataset");
  const std::size_t d = data.paths.front().dim;
  const auto cn = data.paths.front().checkpoint_index(n);
  if (!cn) throw DomainError("quadratic variation needs a checkpoint at n");
  MomentAccumulator acc(d * d);
  std::vector<double> q(d * d);
  for (const auto& p : data.paths) {
    const auto m = martingale_series(p, ref, drift);
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t c = 1; c <= *cn; ++c)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          q[i * d + j] += (m.at(c)[i] - m.at(c - 1)[i]) * (m.at(c)[j] - m.at(c - 1)[j]) / static_cast<double>(n);
    acc.add(q);
  }
  QuadraticVariation r;
  r.dim = d;
  r.n = n;
  r.matrix = acc.mean();
  for (std::size_t i = 0; i < d * d; ++i) r.se.push_back(acc.standard_error(i));
  return r;
}

std::vector<BoundaryWord> boundary_sample_bank(const WalkSpec& spec, const StabilizationParams& params,
                                               std::size_t horizon, std::uint64_t seed, std::size_t count) {
  std::vector<BoundaryWord> bank;
  bank.reserve(count);
  for (std::size_t i = 0; i < count; ++i) bank.push_back(limit_boundary_point(spec, params, horizon, mix_seed(seed, i)));
  return bank;
}

PsiEstimate estimate_psi(const BoundaryWord& x, const std::vector<BoundaryWord>& samples) {
  if (samples.size() < 100) throw DomainError("psi needs at least 100 boundary samples");
  PsiEstimate r;
  MomentAccumulator acc(1);
  for (const auto& y : samples) {
    const auto g = static_cast<double>(gromov_product(x, y, kPsiTruncation));
    if (g >= static_cast<double>(kPsiTruncation)) ++r.truncated;
    acc.add(std::span(&g, 1));
  }
  r.value = acc.mean()[0];
  r.se = acc.standard_error();
  r.samples = samples.size();
  if (r.truncated > 0)
    r.warning = std::to_string(r.truncated) + " sample(s) agree with x past " + std::to_string(kPsiTruncation) +
                " letters; the estimate is truncated";
  return r;
}

PsiDriftReport psi_drift_check(const StepMeasure& mu, const std::vector<BoundaryWord>& xs,
                               const std::vector<BoundaryWord>& samples) {
  PsiDriftReport r;
  std::vector<double> raw, rec, var;
  for (const auto& x : xs) {
    const PsiEstimate px = estimate_psi(x, samples);
    double drift_raw = 0.0, drift_rec = 0.0, v = 0.0;
    for (const auto& a : mu.atoms()) {
      // g = a^-1 is a step of the inverse walk.
      const Word g = invert(a.word);
      const double sigma = static_cast<double>(busemann_cocycle(g, x));
      const PsiEstimate pgx = estimate_psi(translate(g, x), samples);
      drift_raw += a.probability * sigma;
      drift_rec += a.probability * (sigma - 2.0 * (pgx.value - px.value));
      v += a.probability * a.probability * 4.0 * (pgx.se * pgx.se + px.se * px.se);
    }
    raw.push_back(drift_raw);
    rec.push_back(drift_rec);
    var.push_back(v);
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  r.raw_drift = raw;
  r.recentred_drift = rec;
  for (double v : var) r.recentred_se.push_back(std::sqrt(v));
  r.raw_spread = spread(raw);
  r.recentred_spread = spread(rec);
  const double max_se = *std::max_element(r.recentred_se.begin(), r.recentred_se.end());
  r.spread_tolerance = 2.0 * std::sqrt(2.0) * max_se;
  r.pass = r.recentred_spread <= r.spread_tolerance;
  return r;
}

FosterReport foster_check(const Dataset& data) {
  FosterReport r;
  if (data.paths.empty()) return r;
  const std::size_t m = data.paths.front().stopping.size();
  r.pass = true;
  r.monotone = true;
  for (std::size_t i = 0; i < m; ++i) {
    MomentAccumulator acc(1);
    for (const auto& p : data.paths) {
      const auto& hit = p.stopping[i];
      if (hit.tau == kCensored) continue;
      const double tau = static_cast<double>(hit.tau);
      acc.add(std::span(&tau, 1));
    }
    FosterRow row;
    row.s = data.paths.front().stopping[i].threshold;
    row.hits = acc.count();
    row.mean_tau = acc.count() ? acc.mean()[0] : 0.0;
    row.se = acc.standard_error();
    row.pass = row.hits == data.paths.size() && row.mean_tau <= row.s + 3.0 * row.se;
    if (!r.rows.empty() && row.mean_tau < r.rows.back().mean_tau) r.monotone = false;
    r.pass = r.pass && row.pass;
    r.rows.push_back(row);
  }
  r.pass = r.pass && r.monotone;
  return r;
}

OvershootReport overshoot_stats(const Dataset& data, double lambda_ref, double band,
                                std::optional<std::size_t> max_word_length) {
  OvershootReport r;
  r.band = band;
  if (data.paths.empty() || data.paths.front().stopping.empty()) {
    r.pass = true;
    return r;
  }
  bool exact = true;
  std::vector<double> p99s;
  for (std::size_t i = 0; i < data.paths.front().stopping.size(); ++i) {
    OvershootRow row;
    row.s = data.paths.front().stopping[i].threshold;
    for (const auto& p : data.paths) {
      const auto& hit = p.stopping[i];
      if (hit.tau == kCensored) continue;
      row.values.push_back(hit.t - row.s * lambda_ref);
    }
    if (row.values.empty()) continue;
    row.p99 = quantile(row.values, 0.99);
    row.max = *std::max_element(row.values.begin(), row.values.end());
    row.min = *std::min_element(row.values.begin(), row.values.end());
    if (max_word_length && (row.min < 0.0 || row.max > static_cast<double>(*max_word_length))) exact = false;
    p99s.push_back(row.p99);
    r.rows.push_back(std::move(row));
  }
  if (!p99s.empty()) r.p99_spread = *std::max_element(p99s.begin(), p99s.end()) - *std::min_element(p99s.begin(), p99s.end());
  if (max_word_length) r.exact_bound = exact;
  r.pass = r.p99_spread <= band && (!max_word_length || exact);
  return r;
}

TimeControlReport time_control_check(const Dataset& data, double R, double tolerance) {
  TimeControlReport r;
  r.R = R;
  r.tolerance = tolerance;
  if (data.paths.empty()) return r;
  for (std::size_t i = 0; i < data.paths.front().stopping.size(); ++i) {
    const double s = data.paths.front().stopping[i].threshold;
    std::size_t in = 0;
    for (const auto& p : data.paths) {
      const auto& hit = p.stopping[i];
      if (hit.tau != kCensored && std::fabs(static_cast<double>(hit.tau) - s) <= R * std::sqrt(s)) ++in;
    }
    r.s.push_back(s);
    r.fraction.push_back(static_cast<double>(in) / static_cast<double>(data.paths.size()));
  }
  if (!r.fraction.empty())
    r.spread = *std::max_element(r.fraction.begin(), r.fraction.end()) -
               *std::min_element(r.fraction.begin(), r.fraction.end());
  r.pass = !r.fraction.empty() && r.spread <= tolerance;
  return r;
}

TrackingReport tracking_check(const Dataset& data, double D, double required_fraction, double slope_tolerance,
                              double min_r2) {
  TrackingReport r;
  r.D = D;
  r.required_fraction = required_fraction;
  r.slope_tolerance = slope_tolerance;
  if (data.paths.empty()) return r;
  r.n = data.paths.front().horizon;
  const double bound = D * std::log(static_cast<double>(r.n));
  std::size_t within = 0, measured = 0;
  for (const auto& p : data.paths) {
    if (p.max_tracking == kCensored) continue;
    ++measured;
    if (static_cast<double>(p.max_tracking) <= bound) ++within;
  }
  if (measured == 0) throw DomainError("dataset carries no tracking distances");
  r.fraction_within = static_cast<double>(within) / static_cast<double>(measured);
  r.bound_pass = r.fraction_within >= required_fraction;

  bool fits_ok = true;
  for (std::size_t i = 0; i < data.paths.front().stopping.size(); ++i) {
    std::vector<double> values;
    for (const auto& p : data.paths)
      if (p.stopping[i].tracking != kCensored) values.push_back(static_cast<double>(p.stopping[i].tracking));
    if (values.empty()) continue;
    std::vector<double> support(values);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    std::vector<double> xs, ys;
    // Tail P(T >= v) at each positive support value.
    for (double v : support) {
      if (v <= 0.0) continue;
      const auto c = std::count_if(values.begin(), values.end(), [&](double x) { return x >= v; });
      xs.push_back(v);
      ys.push_back(std::log(static_cast<double>(c) / static_cast<double>(values.size())));
    }
    const LinearFit fit = linear_fit(xs, ys);
    if (!(fit.slope < 0.0) || fit.r2 <= min_r2 || fit.points < 3) fits_ok = false;
    r.s.push_back(data.paths.front().stopping[i].threshold);
    r.tail_fits.push_back(fit);
  }
  if (!r.tail_fits.empty()) {
    double mean = 0.0;
    for (const auto& f : r.tail_fits) mean += f.slope;
    mean /= static_cast<double>(r.tail_fits.size());
    for (const auto& f : r.tail_fits) r.slope_spread = std::max(r.slope_spread, std::fabs(f.slope / mean - 1.0));
  }
  r.tail_pass = fits_ok && !r.tail_fits.empty() && r.slope_spread <= slope_tolerance;
  return r;
}

XControlReport x_control_check(const WalkSpec& spec, const std::vector<std::size_t>& n_list,
                               const std::vector<std::pair<BoundaryWord, BoundaryWord>>& pairs, std::size_t samples,
                               std::uint64_t seed, const std::vector<double>& epsilon) {
  XControlReport r;
  r.monotone = true;
  for (std::size_t n : n_list) {
    XControlRow row;
    row.n = n;
    row.epsilon = epsilon;
    std::vector<double> diffs;
    for (std::size_t i = 0; i < samples; ++i) {
      const Word g = position_at(spec, mix_seed(seed ^ n, i), n);
      for (const auto& [x, y] : pairs)
        diffs.push_back(std::fabs(static_cast<double>(busemann_cocycle(g, x) - busemann_cocycle(g, y))));
    }
    for (double e : epsilon) row.R.push_back(quantile(diffs, 1.0 - e));
    for (std::size_t i = 1; i < epsilon.size(); ++i)
      if ((epsilon[i] < epsilon[i - 1]) != (row.R[i] >= row.R[i - 1])) r.monotone = false;
    r.rows.push_back(std::move(row));
  }
  r.stable = true;
  if (r.rows.size() >= 2) {
    const auto& a = r.rows[r.rows.size() - 2].R;
    const auto& b = r.rows.back().R;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::fabs(a[i] - b[i]) > std::max(2.0, 0.1 * a[i])) r.stable = false;
  }
  return r;
}

ExitResult first_exit(std::span<const double> series, const ExitWindow& window) {
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (static_cast<double>(t) > window.horizon()) break;
    if (series[t] > window.upper()) return {1, static_cast<std::int64_t>(t)};
    if (series[t] < window.lower()) return {-1, static_cast<std::int64_t>(t)};
  }
  return {0, static_cast<std::int64_t>(std::min<double>(static_cast<double>(series.size()), window.horizon()))};
}

std::vector<ExitRow> exit_statistics(const Dataset& data, const std::vector<ExitWindow>& windows, bool martingale) {
  std::vector<ExitRow> rows;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    ExitRow row;
    row.window = windows[w];
    row.target = windows[w].k / (windows[w].k + windows[w].l);
    std::size_t up = 0;
    for (const auto& p : data.paths) {
      const auto& e = (martingale ? p.martingale_exits : p.ray_exits).at(w);
      if (e.side == 0) {
        ++row.censored;
        continue;
      }
      ++row.exited;
      if (e.side > 0) ++up;
    }
    if (row.exited) {
      row.upper_frequency = static_cast<double>(up) / static_cast<double>(row.exited);
      row.se = std::sqrt(row.upper_frequency * (1.0 - row.upper_frequency) / static_cast<double>(row.exited));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hyperwind
