#pragma once

// Run configuration: JSON documents validated against a fixed schema before
// any computation, bundled presets, and the versioned tolerance defaults.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hyperwind/stats.hpp"
#include "hyperwind/walk.hpp"

namespace hyperwind {

struct Tolerances {
  std::string version = "1";
  double escape_abs = 0.01;
  LlnOptions lln;
  CltOptions clt;
  StoppedCltOptions clt_stopped;
  double route_se_multiplier = 3.0;
  /// z for the two-sided 99% interval on the smallest eigenvalue.
  double rank_z = 2.576;
  GrOptions gr;
  PldOptions pld;
  double foster_se_multiplier = 3.0;
  double time_control_spread = 0.03;
  double overshoot_band = 1.0;
  double tracking_fraction = 0.95;
  double tracking_slope_spread = 0.25;
  double tracking_min_r2 = 0.9;
  LilOptions lil;
  double plane_busemann = 1e-6;
  double plane_isometry = 1e-9;
  double plane_cocycle = 1e-8;
  double plane_drift_z = 2.576;
  std::size_t exact_instances = 10000;
  double exact_seconds = 10.0;
};

/// Overrides fields present in the JSON text; unknown keys are schema errors.
void apply_tolerances(Tolerances& tol, const std::string& json_text);
Tolerances load_tolerances(const std::filesystem::path& path);
/// The versioned defaults shipped with the presets.
Tolerances default_tolerances();

struct AtomConfig {
  std::string word;
  /// Decimal or exact "p/q" text.
  std::string probability;
};

struct PlaneConfig {
  std::optional<double> symmetric_radius;
  /// Real SL(2,R) matrices (a, b, c, d).
  std::vector<std::array<double, 4>> generators;
  /// (angle, radius) for each letter, inverse after generator.
  std::vector<std::array<double, 2>> disks;
};

struct ExitConfig {
  double k = 1.0;
  double l = 1.0;
  std::vector<double> s;
};

struct CalibrationConfig {
  std::size_t paths = 4000;
  std::size_t horizon = 2000;
  /// Threshold for the time-control constant R.
  double threshold = 100.0;
  /// Horizon for the tracking constant D.
  std::size_t tracking_horizon = 1000;
};

struct EstimateConfig {
  std::uint64_t formula_n = 0;
  double ray_time = 0.0;
};

struct RunConfig {
  std::string name;
  std::string description;
  ModelKind kind = ModelKind::tree;
  std::size_t rank = 2;
  PlaneConfig plane;
  std::vector<AtomConfig> measure;
  /// Images of the generators; empty selects the canonical map.
  std::vector<std::vector<std::int64_t>> projection;
  std::uint64_t seed = 1;
  std::size_t paths = 0;
  std::size_t horizon = 0;
  std::size_t stride = 0;
  std::vector<double> thresholds;
  /// Periods of periodic boundary words (tree) or angles (plane).
  std::vector<std::variant<std::string, double>> references;
  std::vector<double> ray_times;
  bool tracking = false;
  std::vector<double> functional;
  std::vector<ExitConfig> exits;
  CalibrationConfig calibration;
  EstimateConfig estimate;
  std::vector<std::string> tests;
  Tolerances tolerances;
  std::optional<double> oracle_lambda;
  std::string out;
  std::size_t workers = 0;

  WalkSpec walk_spec() const;
  std::vector<BoundaryWord> tree_references() const;
  std::vector<double> plane_references() const;
  /// Windows in the order recorded by the walk.
  std::vector<ExitWindow> exit_windows() const;
};

/// Known test names, in reporting order.
const std::vector<std::string>& known_tests();

RunConfig parse_config(const std::string& json_text, const Tolerances& base = default_tolerances());
RunConfig load_config(const std::filesystem::path& path, const Tolerances& base = default_tolerances());
/// Canonical JSON form; identical configs give identical text.
std::string canonical_json(const RunConfig& config);

std::filesystem::path preset_directory();
std::vector<std::string> preset_names();
RunConfig load_preset(const std::string& name, const Tolerances& base = default_tolerances());

}  // namespace hyperwind
