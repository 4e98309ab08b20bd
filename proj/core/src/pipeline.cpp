#include "hyperwind/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hyperwind/error.hpp"
#include "hyperwind/io.hpp"
#include "hyperwind/martingale.hpp"
#include "hyperwind/rng.hpp"
#include "hyperwind/svg.hpp"

namespace hyperwind {

namespace fs = std::filesystem;
using nlohmann::json;

std::string artifact_version() { return HYPERWIND_VERSION; }

namespace {

constexpr std::uint64_t kCalibrationTag = 0xCA1B0A7E5EEDULL;
constexpr std::uint64_t kBankTag = 0xBA7CB0DA2C1ULL;

/// Digest of the fields that shape the dataset; tests, tolerances and
/// estimator settings can change without invalidating a simulation.
std::string config_digest(const RunConfig& c) {
  json j = json::parse(canonical_json(c));
  for (const char* key : {"description", "estimate", "tests", "tolerances", "oracle"}) j.erase(key);
  return text_digest(j.dump());
}

std::string estimate_digest(const RunConfig& c) {
  const json j = json::parse(canonical_json(c));
  json part = {{"estimate", j.at("estimate")}, {"routes", j.at("tolerances").at("routes")}};
  if (j.contains("oracle")) part["oracle"] = j.at("oracle");
  return text_digest(part.dump());
}

bool needs_calibration(const RunConfig& c) {
  return c.paths > 0 && (!c.thresholds.empty() || (c.kind == ModelKind::tree && (!c.ray_times.empty() || c.tracking ||
                                                                                  !c.exits.empty())));
}

std::string rational_text(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

bool is_centred(const AbelianMoments& m) {
  if (m.exact)
    return std::all_of(m.mean_exact.begin(), m.mean_exact.end(), [](const Rational& r) { return r == Rational(0); });
  return std::all_of(m.mean.begin(), m.mean.end(), [](double v) { return std::fabs(v) < 1e-15; });
}

// JSON forms of the stage outputs.

json to_json(const Calibration& c) {
  return {{"seed", c.seed},          {"paths", c.paths},         {"horizon", c.horizon},
          {"lambda", c.lambda},      {"lambda_se", c.lambda_se}, {"lambda_ref", c.lambda_ref}, {"sigma", c.sigma},
          {"drift", c.drift},        {"time_control_R", c.time_control_R}, {"tracking_D", c.tracking_D}};
}

Calibration calibration_from(const json& j) {
  Calibration c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.paths = j.at("paths").get<std::size_t>();
  c.horizon = j.at("horizon").get<std::size_t>();
  c.lambda = j.at("lambda").get<double>();
  c.lambda_se = j.at("lambda_se").get<double>();
  c.lambda_ref = j.at("lambda_ref").get<double>();
  c.sigma = j.at("sigma").get<double>();
  c.drift = j.at("drift").get<std::vector<double>>();
  c.time_control_R = j.at("time_control_R").get<double>();
  c.tracking_D = j.at("tracking_D").get<double>();
  return c;
}

json to_json(const CovarianceEstimate& e) {
  return {{"dim", e.dim},
          {"matrix", e.matrix},
          {"se", e.se},
          {"samples", e.samples},
          {"eigenvalues", e.eigenvalues},
          {"min_eigenvalue_se", e.min_eigenvalue_se},
          {"symmetry_error", e.symmetry_error},
          {"psd", e.psd}};
}

CovarianceEstimate covariance_from(const json& j) {
  CovarianceEstimate e;
  e.dim = j.at("dim").get<std::size_t>();
  e.matrix = j.at("matrix").get<std::vector<double>>();
  e.se = j.at("se").get<std::vector<double>>();
  e.samples = j.at("samples").get<std::size_t>();
  e.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  e.min_eigenvalue_se = j.at("min_eigenvalue_se").get<double>();
  e.symmetry_error = j.at("symmetry_error").get<double>();
  e.psd = j.at("psd").get<bool>();
  return e;
}

json to_json(const RunManifest& m, bool with_run) {
  json j = {{"artifact_version", m.artifact_version},
            {"config_name", m.config_name},
            {"config_digest", m.config_digest},
            {"seed", m.seed},
            {"paths", m.paths},
            {"horizon", m.horizon},
            {"files", m.files},
            {"dataset_digest", m.dataset_digest},
            {"calibrated", m.calibrated}};
  if (m.calibrated) j["calibration"] = to_json(m.calibration);
  if (with_run) j["run"] = {{"workers", m.workers}, {"wall_seconds", m.wall_seconds}};
  return j;
}

json to_json(const TestReport& r) {
  json details = json::array();
  for (const auto& d : r.details) details.push_back({{"key", d.key}, {"values", d.values}});
  auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); };
  return {{"name", r.name},
          {"statistic_name", r.statistic_name},
          {"statistic", finite(r.statistic)},
          {"threshold", finite(r.threshold)},
          {"pass", r.pass},
          {"degenerate", r.degenerate},
          {"vacuous", r.vacuous},
          {"proxy", r.proxy},
          {"samples", r.samples},
          {"seed", r.seed},
          {"dataset_digest", r.dataset_digest},
          {"note", r.note},
          {"details", details}};
}

double number_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

TestReport report_from(const json& j) {
  TestReport r;
  r.name = j.at("name").get<std::string>();
  r.statistic_name = j.at("statistic_name").get<std::string>();
  r.statistic = number_from(j.at("statistic"));
  r.threshold = number_from(j.at("threshold"));
  r.pass = j.at("pass").get<bool>();
  r.degenerate = j.at("degenerate").get<bool>();
  r.vacuous = j.at("vacuous").get<bool>();
  r.proxy = j.at("proxy").get<bool>();
  r.samples = j.at("samples").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.dataset_digest = j.at("dataset_digest").get<std::string>();
  r.note = j.at("note").get<std::string>();
  for (const auto& d : j.at("details"))
    r.add(d.at("key").get<std::string>(), d.at("values").get<std::vector<double>>());
  return r;
}

std::string test_key(const std::string& report_name) { return report_name.substr(0, report_name.find(':')); }

bool selected(const RunConfig& c, const std::string& test) {
  return std::find(c.tests.begin(), c.tests.end(), test) != c.tests.end();
}

/// Index of `value` in `times`, or throws naming `what`.
std::size_t index_of(const std::vector<double>& times, double value, const std::string& what) {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] == value) return i;
  throw DomainError(what + " " + format_double(value) + " is not among the recorded times");
}

Word random_reduced(std::mt19937_64& rng, std::size_t rank, std::size_t length) {
  std::uniform_int_distribution<int> gen(1, static_cast<int>(rank));
  std::uniform_int_distribution<int> sign(0, 1);
  Word w;
  while (w.size() < length) {
    const Letter l(gen(rng), sign(rng) ? 1 : -1);
    if (!w.empty() && w.back().cancels(l)) continue;
    w.push_back(l);
  }
  return w;
}

Word random_cyclically_reduced(std::mt19937_64& rng, std::size_t rank, std::size_t length) {
  for (;;) {
    Word w = random_reduced(rng, rank, length);
    if (!w.empty() && !w[0].cancels(w.back())) return w;
  }
}

}  // namespace

std::string RunManifest::digest() const { return text_digest(to_json(*this, false).dump()); }

Calibration calibrate(const RunConfig& config, std::size_t workers) {
  const WalkSpec spec = config.walk_spec();
  Calibration cal;
  cal.seed = splitmix64(config.seed ^ kCalibrationTag);
  cal.paths = config.calibration.paths;
  cal.horizon = config.calibration.horizon;

  ObservationPlan plain;
  plain.horizon = cal.horizon;
  plain.stride = cal.horizon;
  const Dataset a = batch_run(spec, plain, cal.seed, cal.paths, workers);
  MomentAccumulator t(1);
  for (const auto& p : a.paths) {
    const double v = p.t.back();
    t.add(std::span(&v, 1));
  }
  const double n = static_cast<double>(cal.horizon);
  cal.lambda = t.mean()[0] / n;
  cal.lambda_se = t.standard_error() / n;
  cal.sigma = std::sqrt(t.variance()) / std::sqrt(n);
  if (!(cal.lambda > 0.0)) throw DomainError("calibration found a non-positive escape rate");
  const auto exact = config.oracle_lambda ? config.oracle_lambda : simple_walk_escape_rate(config);
  cal.lambda_ref = exact ? *exact : cal.lambda;
  const auto moments = exact_abelian_moments(spec.measure, spec.projection);
  for (double m : moments.mean) cal.drift.push_back(m / cal.lambda);

  const bool want_r = !config.thresholds.empty();
  const bool want_d = config.tracking && config.kind == ModelKind::tree;
  if (want_r || want_d) {
    ObservationPlan b;
    const double s = config.calibration.threshold;
    b.horizon = std::max<std::size_t>(want_d ? config.calibration.tracking_horizon : 0,
                                      static_cast<std::size_t>(std::ceil(4.0 * s)));
    b.stride = b.horizon;
    if (want_r) b.stopping = StoppingSpec{{s}, cal.lambda_ref};
    b.stabilization = StabilizationParams{cal.lambda, cal.sigma};
    b.tracking = want_d;
    const Dataset bd = batch_run(spec, b, splitmix64(cal.seed + 1), cal.paths, workers);
    std::vector<double> r, dd;
    for (const auto& p : bd.paths) {
      if (want_r && p.stopping.front().tau != kCensored)
        r.push_back(std::fabs(static_cast<double>(p.stopping.front().tau) - s) / std::sqrt(s));
      if (want_d) dd.push_back(static_cast<double>(p.max_tracking) / std::log(static_cast<double>(b.horizon)));
    }
    if (want_r && !r.empty()) cal.time_control_R = quantile(r, 0.95);
    if (want_d) cal.tracking_D = quantile(dd, 0.95);
  }
  return cal;
}

ObservationPlan observation_plan(const RunConfig& config, const std::optional<Calibration>& cal) {
  ObservationPlan plan;
  plan.horizon = config.horizon;
  plan.stride = config.stride;
  if (!config.thresholds.empty()) {
    if (!cal) throw StageOrderError("stopping thresholds need a calibrated escape rate");
    plan.stopping = StoppingSpec{config.thresholds, cal->lambda_ref};
  }
  if (cal) plan.stabilization = StabilizationParams{cal->lambda, cal->sigma};
  plan.tree_refs = config.tree_references();
  plan.plane_refs = config.plane_references();
  plan.ray_times = config.ray_times;
  plan.tracking = config.tracking;
  plan.exits = config.exit_windows();
  if (!plan.exits.empty()) {
    plan.functional = config.functional;
    plan.drift = cal ? cal->drift : std::vector<double>(config.walk_spec().dim(), 0.0);
  }
  return plan;
}

RunManifest simulate(const RunConfig& config, const fs::path& dir, std::size_t workers) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.artifact_version = artifact_version();
  m.config_name = config.name;
  m.config_digest = config_digest(config);
  m.seed = config.seed;
  m.paths = config.paths;
  m.horizon = config.horizon;
  m.workers = workers;
  std::optional<Calibration> cal;
  if (needs_calibration(config)) cal = calibrate(config, workers);
  m.calibrated = cal.has_value();
  if (cal) m.calibration = *cal;

  const WalkSpec spec = config.walk_spec();
  Dataset data;
  data.master_seed = config.seed;
  if (config.paths > 0) data = batch_run(spec, observation_plan(config, cal), config.seed, config.paths, workers);
  fs::create_directories(dir);
  // Drop outputs of any earlier run in this directory.
  for (const char* stale : {"estimates.json", "reports.json", "summary.txt"}) fs::remove(dir / stale);
  const auto files = write_dataset(data, dir);
  m.files = files.digests;
  m.dataset_digest = files.combined;
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text(dir / "config.json", canonical_json(config));
  write_text(dir / "manifest.json", to_json(m, true).dump(2));
  return m;
}

RunManifest load_manifest(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json")) throw StageOrderError("no dataset in " + dir.string() + ": run simulate first");
  const json j = json::parse(read_text_file(dir / "manifest.json"));
  RunManifest m;
  m.artifact_version = j.at("artifact_version").get<std::string>();
  m.config_name = j.at("config_name").get<std::string>();
  m.config_digest = j.at("config_digest").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.paths = j.at("paths").get<std::size_t>();
  m.horizon = j.at("horizon").get<std::size_t>();
  m.files = j.at("files").get<std::map<std::string, std::string>>();
  m.dataset_digest = j.at("dataset_digest").get<std::string>();
  m.calibrated = j.at("calibrated").get<bool>();
  if (m.calibrated) m.calibration = calibration_from(j.at("calibration"));
  if (j.contains("run")) {
    m.workers = j.at("run").at("workers").get<std::size_t>();
    m.wall_seconds = j.at("run").at("wall_seconds").get<double>();
  }
  return m;
}

Dataset load_run(const RunConfig& config, const fs::path& dir, RunManifest* out) {
  const RunManifest m = load_manifest(dir);
  if (m.config_digest != config_digest(config))
    throw DigestMismatch("configuration differs from the one used by simulate (" + m.config_digest + ")");
  const auto files = digest_dataset(dir);
  if (files.combined != m.dataset_digest) {
    std::string which;
    for (const auto& [name, digest] : files.digests)
      if (m.files.count(name) == 0 || m.files.at(name) != digest) which += " " + name;
    throw DigestMismatch("dataset files changed since simulate:" + which);
  }
  if (out) *out = m;
  return read_dataset(dir, m.seed);
}

std::optional<double> simple_walk_escape_rate(const RunConfig& config) {
  if (config.kind != ModelKind::tree) return std::nullopt;
  const WalkSpec spec = config.walk_spec();
  const auto& atoms = spec.measure.atoms();
  const std::size_t k = spec.measure.rank();
  if (atoms.size() != 2 * k) return std::nullopt;
  std::vector<bool> seen(2 * k, false);
  for (const auto& a : atoms) {
    if (a.word.size() != 1 || std::fabs(a.probability - 1.0 / static_cast<double>(2 * k)) > 1e-15)
      return std::nullopt;
    seen[static_cast<std::size_t>(a.word[0].dense_index())] = true;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return std::nullopt;
  return static_cast<double>(2 * k - 2) / static_cast<double>(2 * k);
}

Estimates estimate(const RunConfig& config, const fs::path& dir) {
  RunManifest m;
  const Dataset data = load_run(config, dir, &m);
  const WalkSpec spec = config.walk_spec();
  Estimates e;
  e.dataset_digest = m.dataset_digest;
  e.settings_digest = estimate_digest(config);
  e.moments = exact_abelian_moments(spec.measure, spec.projection);
  const std::size_t d = spec.dim();

  if (!data.paths.empty() && config.horizon >= 1000) e.drift = estimate_lambda(data, e.moments.mean);
  // The drift reference divides the exact mean by an escape rate measured on
  // an independent calibration sample when there is one.
  double lambda = 0.0, lambda_se = 0.0;
  if (m.calibrated) {
    lambda = m.calibration.lambda;
    lambda_se = m.calibration.lambda_se;
  } else if (e.drift) {
    lambda = e.drift->lambda;
    lambda_se = e.drift->se;
  }
  e.e.assign(d, 0.0);
  e.e_se.assign(d, 0.0);
  if (lambda > 0.0)
    for (std::size_t j = 0; j < d; ++j) {
      e.e[j] = e.moments.mean[j] / lambda;
      e.e_se[j] = std::fabs(e.moments.mean[j]) * lambda_se / (lambda * lambda);
    }

  const double lambda_hat = e.drift ? e.drift->lambda : lambda;
  if (config.estimate.formula_n > 0 && !data.paths.empty()) {
    if (!(lambda_hat > 0.0)) throw StageOrderError("formula route needs an escape-rate estimate");
    e.formula = estimate_Anu_formula_all(data, config.estimate.formula_n, e.e, lambda_hat);
  }
  if (config.estimate.ray_time > 0.0 && !data.paths.empty())
    e.empirical = estimate_Anu_empirical(data, index_of(config.ray_times, config.estimate.ray_time, "ray time"), e.e);
  if (e.formula && e.empirical)
    e.agreement = compare_routes(e.formula->combined, *e.empirical, config.tolerances.route_se_multiplier);

  const auto oracle = config.oracle_lambda ? config.oracle_lambda : simple_walk_escape_rate(config);
  if (is_centred(e.moments) && (oracle || lambda_hat > 0.0)) {
    const double l = oracle ? *oracle : lambda_hat;
    e.covariance.resize(d * d);
    for (std::size_t i = 0; i < d * d; ++i) e.covariance[i] = e.moments.covariance[i] / l;
    e.covariance_source = oracle ? "centred identity Cov(mu_ab) / lambda (exact lambda)"
                                 : "centred identity Cov(mu_ab) / lambda (estimated lambda)";
  } else if (e.formula) {
    e.covariance = e.formula->combined.matrix;
    e.covariance_source = "formula route";
  } else if (e.empirical) {
    e.covariance = e.empirical->matrix;
    e.covariance_source = "ray route";
  }

  json j;
  j["dataset_digest"] = e.dataset_digest;
  j["settings_digest"] = e.settings_digest;
  json mo = {{"dim", e.moments.dim},
             {"mean", e.moments.mean},
             {"covariance", e.moments.covariance},
             {"determinant", e.moments.determinant},
             {"exact", e.moments.exact}};
  if (e.moments.exact) {
    std::vector<std::string> mean, cov;
    for (const auto& r : e.moments.mean_exact) mean.push_back(rational_text(r));
    for (const auto& r : e.moments.covariance_exact) cov.push_back(rational_text(r));
    mo["mean_exact"] = mean;
    mo["covariance_exact"] = cov;
    if (e.moments.determinant_exact) mo["determinant_exact"] = rational_text(*e.moments.determinant_exact);
  }
  j["moments"] = mo;
  if (e.drift)
    j["escape"] = {{"lambda", e.drift->lambda},
                   {"se", e.drift->se},
                   {"n", e.drift->n},
                   {"paths", e.drift->paths},
                   {"slope", e.drift->slope},
                   {"slope_se", e.drift->slope_se},
                   {"disagreement", e.drift->disagreement},
                   {"drift", e.drift->drift},
                   {"drift_se", e.drift->drift_se}};
  j["e"] = e.e;
  j["e_se"] = e.e_se;
  if (e.formula) {
    json per = json::array();
    for (const auto& c : e.formula->per_reference) per.push_back(to_json(c));
    j["formula"] = {{"n", e.formula->n},
                    {"per_reference", per},
                    {"combined", to_json(e.formula->combined)},
                    {"max_pairwise_distance", e.formula->max_pairwise_distance},
                    {"spread_tolerance", e.formula->spread_tolerance},
                    {"uniformity_violation", e.formula->uniformity_violation},
                    {"stability_n", e.formula->stability_n},
                    {"stable", e.formula->stable}};
  }
  if (e.empirical) j["empirical"] = to_json(*e.empirical);
  if (e.agreement) j["agreement"] = {{"max_z", e.agreement->max_z}, {"agree", e.agreement->agree}};
  j["covariance"] = e.covariance;
  j["covariance_source"] = e.covariance_source;
  write_text(dir / "estimates.json", j.dump(2));
  fs::remove(dir / "reports.json");
  return e;
}

Estimates load_estimates(const fs::path& dir) {
  if (!fs::exists(dir / "estimates.json")) throw StageOrderError("no estimates in " + dir.string() + ": run estimate first");
  const json j = json::parse(read_text_file(dir / "estimates.json"));
  Estimates e;
  e.dataset_digest = j.at("dataset_digest").get<std::string>();
  e.settings_digest = j.at("settings_digest").get<std::string>();
  const auto& mo = j.at("moments");
  e.moments.dim = mo.at("dim").get<std::size_t>();
  e.moments.mean = mo.at("mean").get<std::vector<double>>();
  e.moments.covariance = mo.at("covariance").get<std::vector<double>>();
  e.moments.determinant = mo.at("determinant").get<double>();
  e.moments.exact = mo.at("exact").get<bool>();
  if (e.moments.exact) {
    for (const auto& s : mo.at("mean_exact")) e.moments.mean_exact.push_back(parse_rational(s.get<std::string>()));
    for (const auto& s : mo.at("covariance_exact"))
      e.moments.covariance_exact.push_back(parse_rational(s.get<std::string>()));
    if (mo.contains("determinant_exact"))
      e.moments.determinant_exact = parse_rational(mo.at("determinant_exact").get<std::string>());
  }
  if (j.contains("escape")) {
    const auto& s = j.at("escape");
    DriftEstimate d;
    d.lambda = s.at("lambda").get<double>();
    d.se = s.at("se").get<double>();
    d.n = s.at("n").get<std::uint64_t>();
    d.paths = s.at("paths").get<std::size_t>();
    d.slope = s.at("slope").get<double>();
    d.slope_se = s.at("slope_se").get<double>();
    d.disagreement = s.at("disagreement").get<bool>();
    d.drift = s.at("drift").get<std::vector<double>>();
    d.drift_se = s.at("drift_se").get<std::vector<double>>();
    e.drift = d;
  }
  e.e = j.at("e").get<std::vector<double>>();
  e.e_se = j.at("e_se").get<std::vector<double>>();
  if (j.contains("formula")) {
    const auto& f = j.at("formula");
    FormulaRoute r;
    r.n = f.at("n").get<std::uint64_t>();
    for (const auto& c : f.at("per_reference")) r.per_reference.push_back(covariance_from(c));
    r.combined = covariance_from(f.at("combined"));
    r.max_pairwise_distance = f.at("max_pairwise_distance").get<double>();
    r.spread_tolerance = f.at("spread_tolerance").get<double>();
    r.uniformity_violation = f.at("uniformity_violation").get<bool>();
    r.stability_n = f.at("stability_n").get<std::vector<std::uint64_t>>();
    r.stable = f.at("stable").get<bool>();
    e.formula = r;
  }
  if (j.contains("empirical")) e.empirical = covariance_from(j.at("empirical"));
  if (j.contains("agreement"))
    e.agreement = RouteAgreement{j.at("agreement").at("max_z").get<double>(), j.at("agreement").at("agree").get<bool>()};
  e.covariance = j.at("covariance").get<std::vector<double>>();
  e.covariance_source = j.at("covariance_source").get<std::string>();
  return e;
}

TestReport exact_core_test(const Tolerances& tol, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  TestReport r;
  r.name = "exact-core";
  r.statistic_name = "violations of exact identities";
  r.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(0, 24), rank_pick(2, 4);
  std::size_t reduction = 0, cocycle = 0, bound = 0, equality = 0, conjugation = 0;
  const std::size_t n = tol.exact_instances;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = rank_pick(rng);
    const Word a = random_reduced(rng, k, len(rng));
    const Word b = random_reduced(rng, k, len(rng));
    const Word c = random_reduced(rng, k, len(rng));
    // Reduction: inverses cancel, products are associative and reduced.
    std::vector<Letter> raw(a.begin(), a.end());
    raw.insert(raw.end(), b.begin(), b.end());
    const Word ab = reduce(raw);
    if (!multiply(a, invert(a)).empty() || multiply(multiply(a, b), c) != multiply(a, multiply(b, c)) ||
        ab != multiply(a, b) || reduce(ab.letters()) != ab)
      ++reduction;
    for (std::size_t j = 1; j < ab.size(); ++j)
      if (ab[j].cancels(ab[j - 1])) ++reduction;

    // Cocycle relation on a periodic boundary point.
    const Word period = random_cyclically_reduced(rng, k, 1 + len(rng) % 6);
    Word prefix = random_reduced(rng, k, len(rng) % 8);
    while (!prefix.empty() && prefix.back().cancels(period[0])) prefix = random_reduced(rng, k, prefix.size());
    const BoundaryWord xi = BoundaryWord::periodic(prefix, period);
    if (busemann_cocycle(multiply(b, a), xi) != busemann_cocycle(b, translate(a, xi)) + busemann_cocycle(a, xi))
      ++cocycle;

    // |sigma(g, xi)| <= |g|, with equality when xi leaves through g^-1's complement.
    const auto s = busemann_cocycle(a, xi);
    if (s > static_cast<std::int64_t>(a.size()) || s < -static_cast<std::int64_t>(a.size())) ++bound;
    if (!a.empty()) {
      const Letter avoid = invert(a)[0];
      Word per;
      per.push_back(avoid == Letter(1, 1) ? Letter(1, -1) : Letter(1, 1));
      if (busemann_cocycle(a, BoundaryWord::periodic(Word{}, per)) != static_cast<std::int64_t>(a.size())) ++equality;
    }

    // Stable length is a conjugacy invariant.
    if (stable_length(multiply(multiply(b, c), invert(b))) != stable_length(c)) ++conjugation;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::size_t total = reduction + cocycle + bound + equality + conjugation;
  r.samples = n;
  r.statistic = static_cast<double>(total);
  r.threshold = 0.0;
  r.add("violations_reduction_cocycle_bound_equality_conjugation",
        {static_cast<double>(reduction), static_cast<double>(cocycle), static_cast<double>(bound),
         static_cast<double>(equality), static_cast<double>(conjugation)});
  r.add("seconds", {seconds, tol.exact_seconds});
  r.pass = total == 0 && seconds < tol.exact_seconds;
  if (seconds >= tol.exact_seconds) r.note = "runtime budget exceeded";
  return r;
}

TestReport plane_geometry_test(const RunConfig& config) {
  const WalkSpec spec = config.walk_spec();
  const auto& model = spec.schottky;
  const auto& tol = config.tolerances;
  TestReport r;
  r.name = "plane:geometry";
  r.statistic_name = "largest violation relative to its tolerance";
  r.seed = config.seed;
  std::mt19937_64 rng(splitmix64(config.seed ^ 0x91A7E));
  std::uniform_real_distribution<double> angle(-M_PI, M_PI), radius(0.0, 0.9);
  std::uniform_int_distribution<std::size_t> len(1, 2), longer(1, 4);
  auto point = [&] { return plane::DiskPoint::checked(std::polar(radius(rng), angle(rng))); };
  auto element = [&](std::size_t n) { return model.evaluate(random_reduced(rng, model.rank(), n)); };
  const std::size_t n = std::max<std::size_t>(1000, tol.exact_instances / 10);
  double busemann = 0.0, isometry = 0.0, cocycle = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = point();
    const auto xi = plane::CircleBoundaryPoint::from_angle(angle(rng));
    const double T = 20.0;
    const double finite = plane::hyp_distance(z, plane::ray_point_disk(xi, T)) - T;
    busemann = std::max(busemann, std::fabs(finite - plane::busemann_disk(xi, z)));

    const auto g = element(len(rng));
    const auto w = point();
    isometry = std::max(isometry, std::fabs(plane::hyp_distance(plane::mobius_apply(g, z), plane::mobius_apply(g, w)) -
                                            plane::hyp_distance(z, w)));

    const auto g1 = element(longer(rng));
    const auto g2 = element(longer(rng));
    const double lhs = plane::busemann_cocycle_disk(g2 * g1, xi);
    const double rhs = plane::busemann_cocycle_disk(g2, plane::mobius_apply(g1, xi)) +
                       plane::busemann_cocycle_disk(g1, xi);
    cocycle = std::max(cocycle, std::fabs(lhs - rhs));
  }
  r.samples = n;
  r.add("busemann_isometry_cocycle", {busemann, isometry, cocycle});
  r.add("tolerances", {tol.plane_busemann, tol.plane_isometry, tol.plane_cocycle});
  r.statistic = std::max({busemann / tol.plane_busemann, isometry / tol.plane_isometry, cocycle / tol.plane_cocycle});
  r.threshold = 1.0;
  r.pass = r.statistic <= 1.0;
  const auto check = validate_schottky(model, 64, false);
  r.add("ping_pong_samples", {static_cast<double>(check.samples_checked)});
  if (!check.pass) {
    r.pass = false;
    r.note = "ping-pong check failed: " + check.violations.front();
  }
  return r;
}

namespace {

TestReport escape_test(const RunConfig& config, const Estimates& e) {
  TestReport r;
  r.name = "escape";
  r.statistic_name = "|lambda_hat - lambda|";
  r.seed = config.seed;
  if (!e.drift) throw StageOrderError("escape test needs an escape-rate estimate (horizon >= 1000)");
  const auto oracle = config.oracle_lambda ? config.oracle_lambda : simple_walk_escape_rate(config);
  r.samples = e.drift->paths;
  r.add("lambda_se_slope_slopese", {e.drift->lambda, e.drift->se, e.drift->slope, e.drift->slope_se});
  if (!oracle) {
    r.statistic = std::fabs(e.drift->lambda - e.drift->slope);
    r.threshold = 3.0 * std::hypot(e.drift->se, e.drift->slope_se);
    r.pass = !e.drift->disagreement;
    r.note = "no closed-form rate; mean and slope estimates compared";
    return r;
  }
  r.add("oracle", {*oracle});
  r.statistic = std::fabs(e.drift->lambda - *oracle);
  r.threshold = config.tolerances.escape_abs;
  r.pass = r.statistic < r.threshold;
  if (e.drift->disagreement) r.note = "mean and slope estimates disagree";
  return r;
}

TestReport routes_test(const RunConfig& config, const Estimates& e) {
  TestReport r;
  r.name = "routes";
  r.statistic_name = "max entrywise |formula - ray| / joint SE";
  r.seed = config.seed;
  if (!e.formula || !e.empirical) throw StageOrderError("route comparison needs both covariance routes");
  r.statistic = e.agreement->max_z;
  r.threshold = config.tolerances.route_se_multiplier;
  r.samples = e.empirical->samples;
  r.add("formula", e.formula->combined.matrix);
  r.add("formula_se", e.formula->combined.se);
  r.add("ray", e.empirical->matrix);
  r.add("ray_se", e.empirical->se);
  r.add("reference_spread", {e.formula->max_pairwise_distance, e.formula->spread_tolerance,
                             static_cast<double>(e.formula->per_reference.size())});
  std::vector<double> stab(e.formula->stability_n.begin(), e.formula->stability_n.end());
  stab.push_back(e.formula->stable ? 1.0 : 0.0);
  r.add("stability_n_then_flag", stab);
  r.pass = e.agreement->agree && !e.formula->uniformity_violation;
  if (e.formula->uniformity_violation) r.note = "formula-route estimates differ across reference points";
  if (!e.formula->stable) r.note += (r.note.empty() ? "" : "; ") + std::string("formula route drifts with n (reported)");
  return r;
}

std::vector<TestReport> rank_test(const RunConfig& config, const Estimates& e) {
  const WalkSpec spec = config.walk_spec();
  std::vector<TestReport> out;
  TestReport det;
  det.name = "rank:determinant";
  det.statistic_name = "det Cov(mu_ab)";
  det.seed = config.seed;
  det.statistic = e.moments.determinant;
  det.pass = e.moments.determinant_exact && *e.moments.determinant_exact == Rational(0);
  det.note = det.pass ? "exactly zero in rational arithmetic"
                      : (e.moments.determinant_exact ? "nonzero" : "measure has no exact rational form");
  out.push_back(det);

  TestReport eig;
  eig.name = "rank:min-eigenvalue";
  eig.statistic_name = "lower 99% bound of the smallest eigenvalue of A_hat";
  eig.seed = config.seed;
  if (!e.formula) throw StageOrderError("rank test needs the formula-route covariance");
  const auto& c = e.formula->combined;
  eig.samples = c.samples;
  eig.statistic = c.eigenvalues.front() - config.tolerances.rank_z * c.min_eigenvalue_se;
  eig.threshold = 0.0;
  eig.add("eigenvalues", c.eigenvalues);
  eig.add("min_eigenvalue_se", {c.min_eigenvalue_se});
  eig.pass = eig.statistic > 0.0;
  out.push_back(eig);

  const auto cert = nondegeneracy_certificate(spec.measure, spec.projection, 4,
                                              config.kind == ModelKind::plane ? &spec.schottky : nullptr);
  TestReport nd;
  nd.name = "rank:certificate";
  nd.statistic_name = "least-squares residual of phi(pi(g)) = l(g)";
  nd.seed = config.seed;
  nd.statistic = cert.residual;
  nd.threshold = cert.threshold;
  nd.samples = cert.products;
  nd.add("phi", cert.phi);
  nd.add("witness_residual", {cert.witness_residual});
  nd.pass = cert.verdict == Verdict::nondegenerate;
  nd.note = to_string(cert.verdict) + ": " + cert.note;
  out.push_back(nd);
  return out;
}

std::vector<TestReport> stopping_test(const RunConfig& config, const Dataset& data, const RunManifest& m) {
  const WalkSpec spec = config.walk_spec();
  const auto& tol = config.tolerances;
  std::vector<TestReport> out;
  const auto foster = foster_check(data);
  TestReport f;
  f.name = "stopping:foster";
  f.statistic_name = "max over s of (mean tau_s - s) / SE";
  f.threshold = tol.foster_se_multiplier;
  f.seed = config.seed;
  f.samples = data.paths.size();
  f.statistic = -std::numeric_limits<double>::infinity();
  std::vector<double> s, mean, se;
  bool ok = true;
  for (const auto& row : foster.rows) {
    s.push_back(row.s);
    mean.push_back(row.mean_tau);
    se.push_back(row.se);
    const double z = row.se > 0.0 ? (row.mean_tau - row.s) / row.se : (row.mean_tau > row.s ? INFINITY : -INFINITY);
    f.statistic = std::max(f.statistic, z);
    if (row.mean_tau > row.s + tol.foster_se_multiplier * row.se) ok = false;
  }
  f.add("s", s);
  f.add("mean_tau", mean);
  f.add("se", se);
  f.add("monotone", {foster.monotone ? 1.0 : 0.0});
  f.pass = ok && foster.monotone;
  out.push_back(f);

  const std::optional<std::size_t> max_len =
      config.kind == ModelKind::tree ? std::optional<std::size_t>(spec.measure.max_length()) : std::nullopt;
  const auto over = overshoot_stats(data, m.calibration.lambda_ref, tol.overshoot_band, max_len);
  TestReport o;
  o.name = "stopping:overshoot";
  o.statistic_name = "spread of the 99th overshoot percentile across s";
  o.seed = config.seed;
  o.samples = data.paths.size();
  o.statistic = over.p99_spread;
  o.threshold = over.band;
  std::vector<double> p99, mx;
  for (const auto& row : over.rows) {
    p99.push_back(row.p99);
    mx.push_back(row.max);
  }
  o.add("p99", p99);
  o.add("max", mx);
  if (max_len) o.add("support_bound", {static_cast<double>(*max_len), over.exact_bound.value_or(false) ? 1.0 : 0.0});
  o.pass = over.pass;
  out.push_back(o);

  const auto tc = time_control_check(data, m.calibration.time_control_R, tol.time_control_spread);
  TestReport t;
  t.name = "stopping:time-control";
  t.statistic_name = "spread of P(|tau_s - s| <= R sqrt s) across s";
  t.seed = config.seed;
  t.samples = data.paths.size();
  t.statistic = tc.spread;
  t.threshold = tc.tolerance;
  t.add("R", {tc.R});
  t.add("s", tc.s);
  t.add("fraction", tc.fraction);
  t.pass = tc.pass;
  out.push_back(t);
  return out;
}

std::vector<TestReport> tracking_test(const RunConfig& config, const Dataset& data, const RunManifest& m) {
  const auto& tol = config.tolerances;
  const auto tr = tracking_check(data, m.calibration.tracking_D, tol.tracking_fraction, tol.tracking_slope_spread,
                                 tol.tracking_min_r2);
  TestReport b;
  b.name = "tracking:bound";
  b.statistic_name = "fraction of paths with max tracking <= D log n";
  b.seed = config.seed;
  b.samples = data.paths.size();
  b.statistic = tr.fraction_within;
  b.threshold = tr.required_fraction;
  b.add("D_n", {tr.D, static_cast<double>(tr.n)});
  b.pass = tr.bound_pass;
  TestReport t;
  t.name = "tracking:tail";
  t.statistic_name = "relative spread of tail slopes across s";
  t.seed = config.seed;
  t.samples = data.paths.size();
  t.statistic = tr.slope_spread;
  t.threshold = tr.slope_tolerance;
  t.add("s", tr.s);
  std::vector<double> slopes, r2;
  for (const auto& f : tr.tail_fits) {
    slopes.push_back(f.slope);
    r2.push_back(f.r2);
  }
  t.add("slope", slopes);
  t.add("r2", r2);
  t.pass = tr.tail_pass;
  return {b, t};
}

TestReport plane_drift_test(const RunConfig& config, const Dataset& data, const Estimates& e) {
  TestReport r;
  r.name = "plane:drift";
  r.statistic_name = "max_j |mean i(r(T))_j / T - e_j| / SE";
  r.seed = config.seed;
  r.samples = data.paths.size();
  r.threshold = config.tolerances.plane_drift_z;
  if (data.paths.empty() || data.paths.front().ray_times.empty()) throw DomainError("plane drift check needs ray windings");
  const std::size_t ti = data.paths.front().ray_times.size() - 1;
  const double T = data.paths.front().ray_times[ti];
  const std::size_t d = data.paths.front().dim;
  MomentAccumulator acc(d);
  std::vector<double> x(d);
  for (const auto& p : data.paths) {
    const auto w = p.ray_winding_at(ti);
    for (std::size_t j = 0; j < d; ++j) x[j] = static_cast<double>(w[j]) / T;
    acc.add(x);
  }
  std::vector<double> se;
  r.statistic = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    se.push_back(acc.standard_error(j));
    const double z = std::fabs(acc.mean()[j] - e.e[j]) / se.back();
    r.statistic = std::max(r.statistic, z);
  }
  r.add("time", {T});
  r.add("mean", acc.mean());
  r.add("se", se);
  r.add("e", e.e);
  r.pass = r.statistic <= r.threshold && is_centred(e.moments) == std::all_of(e.e.begin(), e.e.end(), [](double v) {
             return v == 0.0;
           });
  return r;
}

std::vector<TestReport> martingale_test(const RunConfig& config, const Dataset& data, const Estimates& e) {
  const WalkSpec spec = config.walk_spec();
  std::vector<TestReport> out;
  const auto inc = increment_check(data, 0, e.e, spec.measure.max_length());
  TestReport a;
  a.name = "martingale:increments";
  a.statistic_name = "largest checkpoint increment of M";
  a.seed = config.seed;
  a.samples = data.paths.size();
  a.statistic = inc.max_increment;
  a.threshold = inc.bound;
  a.pass = inc.pass;
  out.push_back(a);

  const std::uint64_t n = config.horizon;
  const auto mm = martingale_mean_check(data, 0, e.e, n / 2, n / 4);
  TestReport b;
  b.name = "martingale:mean";
  b.statistic_name = "max |z| of the mean increment, overall and per history bin";
  b.seed = config.seed;
  b.samples = data.paths.size();
  b.statistic = mm.max_z;
  b.threshold = 3.0;
  b.add("mean_increment", mm.mean);
  b.add("bin_means", mm.bin_means);
  b.pass = mm.pass;
  out.push_back(b);

  if (e.formula) {
    const auto qv = quadratic_variation(data, 0, e.e, e.formula->n);
    TestReport c;
    c.name = "martingale:quadratic-variation";
    c.statistic_name = "max entrywise |<M>_n / (n lambda) - A_hat| / joint SE";
    c.seed = config.seed;
    c.samples = data.paths.size();
    const double lambda = e.drift ? e.drift->lambda : 1.0;
    c.statistic = 0.0;
    for (std::size_t i = 0; i < qv.matrix.size(); ++i) {
      const double diff = std::fabs(qv.matrix[i] / lambda - e.formula->combined.matrix[i]);
      const double se = std::hypot(qv.se[i] / lambda, e.formula->combined.se[i]);
      c.statistic = std::max(c.statistic, se > 0.0 ? diff / se : (diff > 1e-12 ? INFINITY : 0.0));
    }
    c.threshold = config.tolerances.route_se_multiplier;
    c.add("quadratic_variation", qv.matrix);
    c.pass = c.statistic <= c.threshold;
    out.push_back(c);
  }
  return out;
}

TestReport psi_test(const RunConfig& config, const RunManifest& m) {
  const WalkSpec spec = config.walk_spec();
  if (config.kind != ModelKind::tree) throw DomainError("psi recentring is implemented for the tree model");
  if (!m.calibrated) throw StageOrderError("psi test needs calibrated stabilization parameters");
  const StabilizationParams params{m.calibration.lambda, m.calibration.sigma};
  const auto bank = boundary_sample_bank(spec, params, config.calibration.horizon,
                                         splitmix64(config.seed ^ kBankTag), 2000);
  const auto refs = config.tree_references();
  const auto rep = psi_drift_check(spec.measure, refs, bank);
  TestReport r;
  r.name = "psi";
  r.statistic_name = "spread over x of the psi-recentred cocycle drift";
  r.seed = config.seed;
  r.samples = bank.size();
  r.statistic = rep.recentred_spread;
  r.threshold = rep.spread_tolerance;
  r.add("raw_drift", rep.raw_drift);
  r.add("recentred_drift", rep.recentred_drift);
  r.add("raw_spread", {rep.raw_spread});
  r.pass = rep.pass;
  return r;
}

}  // namespace

std::vector<TestReport> run_tests(const RunConfig& config, const fs::path& dir) {
  RunManifest m;
  const Dataset data = load_run(config, dir, &m);
  const Estimates e = load_estimates(dir);
  if (e.dataset_digest != m.dataset_digest)
    throw DigestMismatch("estimates were computed from a different dataset; rerun estimate");
  if (e.settings_digest != estimate_digest(config))
    throw DigestMismatch("estimator settings changed since estimate; rerun estimate");
  const auto& tol = config.tolerances;
  std::vector<TestReport> out;
  auto push = [&](TestReport r) { out.push_back(std::move(r)); };
  auto need_cov = [&] {
    if (e.covariance.empty()) throw StageOrderError("no covariance estimate available; configure estimate routes");
    return std::span<const double>(e.covariance);
  };
  for (const auto& test : known_tests()) {
    if (!selected(config, test)) continue;
    if (test == "exact-core") {
      push(exact_core_test(tol, config.seed));
    } else if (test == "escape") {
      push(escape_test(config, e));
    } else if (test == "lln") {
      auto r = lln_test(data, e.e, e.e_se, tol.lln);
      push(r);
    } else if (test == "clt") {
      auto r = clt_test(data, e.e, need_cov(), index_of(config.ray_times, config.estimate.ray_time, "ray time"),
                        tol.clt);
      r.add("covariance", std::vector<double>(e.covariance));
      push(r);
    } else if (test == "clt-stopped") {
      auto r = clt_stopped_test(data, e.e, need_cov(), m.calibration.lambda_ref, config.thresholds.size() - 1,
                                tol.clt_stopped);
      r.name = "clt-stopped";
      push(r);
    } else if (test == "routes") {
      push(routes_test(config, e));
    } else if (test == "rank") {
      for (auto& r : rank_test(config, e)) push(r);
    } else if (test == "gr") {
      for (const auto& x : config.exits) {
        auto r = gr_test(data, x.k, x.l, config.functional, need_cov(), config.exit_windows(), tol.gr);
        std::ostringstream name;
        name << "gr:k=" << x.k << ",l=" << x.l;
        r.name = name.str();
        push(r);
      }
    } else if (test == "pld") {
      push(pld_test(data, e.e, tol.pld));
    } else if (test == "stopping") {
      for (auto& r : stopping_test(config, data, m)) push(r);
    } else if (test == "tracking") {
      for (auto& r : tracking_test(config, data, m)) push(r);
    } else if (test == "lil") {
      push(lil_test(data, e.e, need_cov(), tol.lil));
    } else if (test == "plane") {
      push(plane_geometry_test(config));
      push(plane_drift_test(config, data, e));
    } else if (test == "martingale") {
      for (auto& r : martingale_test(config, data, e)) push(r);
    } else if (test == "psi") {
      push(psi_test(config, m));
    }
  }
  for (auto& r : out) r.dataset_digest = m.dataset_digest;
  write_text(dir / "reports.json", reports_json(out));
  return out;
}

std::string reports_json(const std::vector<TestReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(2);
}

std::vector<TestReport> load_reports(const fs::path& dir) {
  if (!fs::exists(dir / "reports.json")) throw StageOrderError("no test reports in " + dir.string() + ": run test first");
  std::vector<TestReport> out;
  for (const auto& j : json::parse(read_text_file(dir / "reports.json"))) out.push_back(report_from(j));
  return out;
}

NondegeneracyCertificate certify(const RunConfig& config, const fs::path& dir) {
  const WalkSpec spec = config.walk_spec();
  const auto cert = nondegeneracy_certificate(spec.measure, spec.projection, 4,
                                              config.kind == ModelKind::plane ? &spec.schottky : nullptr);
  const Alphabet abc(config.rank);
  json witness = json::array();
  for (const auto& w : cert.witness)
    witness.push_back({{"element", abc.format(w.element)}, {"image", w.image}, {"stable_length", w.stable_length}});
  const json j = {{"verdict", to_string(cert.verdict)},
                  {"dim", cert.dim},
                  {"rank", cert.rank},
                  {"products", cert.products},
                  {"residual", cert.residual},
                  {"threshold", cert.threshold},
                  {"phi", cert.phi},
                  {"witness", witness},
                  {"witness_residual", cert.witness_residual},
                  {"elementary", cert.elementary},
                  {"note", cert.note},
                  {"config_digest", config_digest(config)}};
  write_text(dir / "certificate.json", j.dump(2));
  return cert;
}

std::string format_table(const std::vector<TestReport>& reports) {
  std::ostringstream out;
  out << "test                              statistic      threshold      samples  verdict\n";
  for (const auto& r : reports) {
    char line[256];
    std::snprintf(line, sizeof line, "%-32s  %-13.6g  %-13.6g  %7zu  %s", r.name.c_str(), r.statistic, r.threshold,
                  r.samples, r.pass ? "PASS" : "FAIL");
    out << line;
    if (r.degenerate) out << " (degenerate)";
    if (r.vacuous) out << " (vacuous)";
    if (r.proxy) out << " (proxy)";
    if (!r.note.empty()) out << "  " << r.note;
    out << "\n";
  }
  return out.str();
}

std::string report(const RunConfig& config, const fs::path& dir) {
  RunManifest m;
  const Dataset data = load_run(config, dir, &m);
  const Estimates e = load_estimates(dir);
  const auto reports = load_reports(dir);
  if (e.dataset_digest != m.dataset_digest) throw DigestMismatch("estimates do not match the dataset");
  for (const auto& r : reports)
    if (r.dataset_digest != m.dataset_digest) throw DigestMismatch("reports do not match the dataset");

  std::ostringstream s;
  s << "run " << config.name << "  (hyperwind " << m.artifact_version << ")\n";
  s << "config digest " << m.config_digest << "  dataset digest " << m.dataset_digest << "\n";
  s << "seed " << m.seed << "  paths " << m.paths << "  horizon " << m.horizon << "\n";
  if (m.calibrated)
    s << "calibration: lambda " << m.calibration.lambda << " +- " << m.calibration.lambda_se << "  sigma "
      << m.calibration.sigma << "  R " << m.calibration.time_control_R << "  D " << m.calibration.tracking_D << "\n";
  if (e.drift) s << "escape rate " << e.drift->lambda << " +- " << e.drift->se << "  (slope " << e.drift->slope << ")\n";
  s << "drift e:";
  for (double v : e.e) s << " " << v;
  s << "\n";
  if (!e.covariance.empty()) {
    s << "covariance (" << e.covariance_source << "):";
    for (double v : e.covariance) s << " " << v;
    s << "\n";
  }
  s << "\n" << format_table(reports);
  const std::string summary = s.str();
  write_text(dir / "summary.txt", summary);
  write_report_plots(config, data, e, reports, dir / "plots");
  return summary;
}

std::vector<TestReport> run_pipeline(const RunConfig& config, const fs::path& dir, std::size_t workers) {
  simulate(config, dir, workers);
  estimate(config, dir);
  return run_tests(config, dir);
}

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> table = {
      {1, "exact core identities", {{"exact-core", "exact-core"}}},
      {2, "rate of escape", {{"srw-f2", "escape"}}},
      {3, "law of large numbers", {{"srw-f2", "lln"}, {"example-anu", "lln"}}},
      {4, "central limit theorem", {{"srw-f2", "clt"}, {"example-anu", "clt"}}},
      {5, "covariance cross-validation", {{"srw-f2", "routes"}, {"example-anu", "routes"}}},
      {6, "rank separation", {{"example-anu", "rank"}}},
      {7, "gambler's ruin", {{"srw-f2-gr", "gr"}}},
      {8, "large deviations", {{"srw-f2-block10", "pld"}}},
      {9, "stopping-time structure", {{"srw-f2", "stopping"}}},
      {10, "geodesic tracking", {{"srw-f2", "tracking"}}},
      {11, "iterated logarithm (proxy)", {{"srw-f2-lil", "lil"}}},
      {12, "plane model", {{"schottky-symmetric", "plane"}}},
  };
  return table;
}

std::vector<CriterionResult> evaluate_criteria(const std::map<std::string, std::vector<TestReport>>& by_preset) {
  std::vector<CriterionResult> out;
  for (const auto& c : acceptance_criteria()) {
    CriterionResult res{c, true, ""};
    for (const auto& [preset, key] : c.parts) {
      const auto it = by_preset.find(preset);
      std::size_t matched = 0;
      if (it != by_preset.end())
        for (const auto& r : it->second)
          if (test_key(r.name) == key) {
            ++matched;
            if (!r.pass) {
              res.pass = false;
              res.detail += (res.detail.empty() ? "" : "; ") + preset + "/" + r.name + " failed";
            }
          }
      if (matched == 0) {
        res.pass = false;
        res.detail += (res.detail.empty() ? "" : "; ") + preset + "/" + key + " not run";
      }
    }
    out.push_back(res);
  }
  return out;
}

}  // namespace hyperwind
