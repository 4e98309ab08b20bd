#pragma once

// Stage orchestration: simulate -> estimate -> test -> report, plus the
// stand-alone certify stage. Each stage reads the previous stage's files
// from the run directory and checks their digests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyperwind/config.hpp"
#include "hyperwind/dataset.hpp"
#include "hyperwind/estimators.hpp"
#include "hyperwind/stats.hpp"

namespace hyperwind {

std::string artifact_version();

struct RunManifest {
  std::string artifact_version;
  std::string config_name;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  std::size_t horizon = 0;
  std::map<std::string, std::string> files;
  std::string dataset_digest;
  bool calibrated = false;
  Calibration calibration;
  /// Not part of the reproducible content.
  std::size_t workers = 0;
  double wall_seconds = 0.0;

  /// Digest over everything except workers and wall-clock time.
  std::string digest() const;
};

/// Stage A: lambda and the per-step spread from plain walks. Stage B, when
/// asked for: the time-control constant R and the tracking constant D.
Calibration calibrate(const RunConfig& config, std::size_t workers);

ObservationPlan observation_plan(const RunConfig& config, const std::optional<Calibration>& calibration);

RunManifest simulate(const RunConfig& config, const std::filesystem::path& dir, std::size_t workers);
RunManifest load_manifest(const std::filesystem::path& dir);
/// Loads the dataset of a run, checking config and file digests.
Dataset load_run(const RunConfig& config, const std::filesystem::path& dir, RunManifest* manifest = nullptr);

struct Estimates {
  std::string dataset_digest;
  std::string settings_digest;
  AbelianMoments moments;
  std::optional<DriftEstimate> drift;
  /// Drift used downstream: exact mean over the calibrated or estimated lambda.
  std::vector<double> e;
  std::vector<double> e_se;
  std::optional<FormulaRoute> formula;
  std::optional<CovarianceEstimate> empirical;
  std::optional<RouteAgreement> agreement;
  /// Covariance used to whiten: the centred identity or the formula route.
  std::vector<double> covariance;
  std::string covariance_source;
};

Estimates estimate(const RunConfig& config, const std::filesystem::path& dir);
Estimates load_estimates(const std::filesystem::path& dir);

/// Runs the selected tests; report names are "<test>" or "<test>:<part>".
std::vector<TestReport> run_tests(const RunConfig& config, const std::filesystem::path& dir);
std::vector<TestReport> load_reports(const std::filesystem::path& dir);

NondegeneracyCertificate certify(const RunConfig& config, const std::filesystem::path& dir);

/// Text summary and SVG plots; returns the summary text.
std::string report(const RunConfig& config, const std::filesystem::path& dir);

/// simulate, estimate and test in one go.
std::vector<TestReport> run_pipeline(const RunConfig& config, const std::filesystem::path& dir, std::size_t workers);

/// Tests that need no dataset.
TestReport exact_core_test(const Tolerances& tol, std::uint64_t seed);
TestReport plane_geometry_test(const RunConfig& config);

/// Birth-death drift (2k - 2) / (2k) of the word length under simple
/// random walk on F_k; empty when the measure is not simple.
std::optional<double> simple_walk_escape_rate(const RunConfig& config);

std::string format_table(const std::vector<TestReport>& reports);
std::string reports_json(const std::vector<TestReport>& reports);

struct Criterion {
  int id = 0;
  std::string title;
  /// (preset, test name prefix) pairs; all matching reports must pass.
  std::vector<std::pair<std::string, std::string>> parts;
};
const std::vector<Criterion>& acceptance_criteria();

struct CriterionResult {
  Criterion criterion;
  bool pass = false;
  std::string detail;
};
/// Evaluates the acceptance table from reports keyed by preset name.
std::vector<CriterionResult> evaluate_criteria(const std::map<std::string, std::vector<TestReport>>& by_preset);

}  // namespace hyperwind
