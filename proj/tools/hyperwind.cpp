// hyperwind: simulate, estimate, test, certify and report winding statistics
// of random walks on free groups and Schottky groups.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hyperwind/config.hpp"
#include "hyperwind/error.hpp"
#include "hyperwind/io.hpp"
#include "hyperwind/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hyperwind;

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> workers;
  std::string out;
  std::string tolerances;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "run configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset, "bundled preset name (test accepts 'all')");
  cmd->add_option("--seed", o.seed, "master seed override");
  cmd->add_option("--paths", o.paths, "path count override");
  cmd->add_option("--horizon", o.horizon, "horizon override");
  cmd->add_option("--workers", o.workers, "worker threads (default: HYPERWIND_WORKERS or all cores)");
  cmd->add_option("--out", o.out, "run directory (default: runs/<name>)");
  cmd->add_option("--tolerances", o.tolerances, "tolerance overrides (JSON)")->check(CLI::ExistingFile);
}

RunConfig resolve(const Options& o, const std::string& preset) {
  RunConfig c;
  if (!o.config.empty() && !preset.empty()) throw SchemaError("--config", "give --config or --preset, not both");
  if (!o.config.empty()) {
    c = load_config(o.config);
  } else if (!preset.empty()) {
    c = load_preset(preset);
  } else if (!o.out.empty() && fs::exists(fs::path(o.out) / "config.json")) {
    c = load_config(fs::path(o.out) / "config.json");
  } else {
    throw SchemaError("--config", "no configuration: give --config, --preset or an --out holding config.json");
  }
  if (o.seed) c.seed = *o.seed;
  if (o.paths) c.paths = *o.paths;
  if (o.horizon) c.horizon = *o.horizon;
  if (!o.tolerances.empty()) apply_tolerances(c.tolerances, read_text_file(o.tolerances));
  return c;
}

std::size_t workers_for(const Options& o, const RunConfig& c) {
  if (o.workers) return std::max<std::size_t>(1, *o.workers);
  if (c.workers) return c.workers;
  return default_workers();
}

fs::path out_for(const Options& o, const RunConfig& c) {
  if (!o.out.empty()) return o.out;
  if (!c.out.empty()) return c.out;
  return fs::path("runs") / c.name;
}

bool all_pass(const std::vector<TestReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

int run_all(const Options& o) {
  const fs::path root = o.out.empty() ? fs::path("runs") : fs::path(o.out);
  std::map<std::string, std::vector<TestReport>> by_preset;
  bool ok = true;
  for (const auto& name : preset_names()) {
    Options one = o;
    one.out.clear();
    const RunConfig c = resolve(one, name);
    std::cout << "== " << name << "\n" << std::flush;
    const auto reports = run_pipeline(c, root / name, workers_for(o, c));
    std::cout << format_table(reports) << "\n" << std::flush;
    ok = ok && all_pass(reports);
    by_preset[name] = reports;
  }
  std::cout << "acceptance\n";
  for (const auto& r : evaluate_criteria(by_preset)) {
    std::printf("%2d  %-30s %s%s%s\n", r.criterion.id, r.criterion.title.c_str(), r.pass ? "PASS" : "FAIL",
                r.detail.empty() ? "" : "  ", r.detail.c_str());
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Winding statistics of random walks on free and Schottky groups"};
  app.require_subcommand(1);
  Options o;
  auto* simulate_cmd = app.add_subcommand("simulate", "run the calibration and the main batch of paths");
  auto* estimate_cmd = app.add_subcommand("estimate", "escape rate, drift and covariance estimates");
  auto* test_cmd = app.add_subcommand("test", "limit-law tests; exit status 0 only if all pass");
  auto* certify_cmd = app.add_subcommand("certify", "non-degeneracy certificate of the measure");
  auto* report_cmd = app.add_subcommand("report", "text summary and SVG plots");
  for (auto* cmd : {simulate_cmd, estimate_cmd, test_cmd, certify_cmd, report_cmd}) add_common(cmd, o);
  CLI11_PARSE(app, argc, argv);

  try {
    if (test_cmd->parsed() && o.preset == "all") return run_all(o);
    const RunConfig c = resolve(o, o.preset);
    const fs::path dir = out_for(o, c);
    if (simulate_cmd->parsed()) {
      const auto m = simulate(c, dir, workers_for(o, c));
      std::cout << "dataset " << dir.string() << "  digest " << m.dataset_digest << "  (" << m.paths << " paths, "
                << m.wall_seconds << " s)\n";
    } else if (estimate_cmd->parsed()) {
      const auto e = estimate(c, dir);
      if (e.drift) std::cout << "lambda " << e.drift->lambda << " +- " << e.drift->se << "\n";
      std::cout << "e:";
      for (double v : e.e) std::cout << " " << v;
      std::cout << "\n";
      if (!e.covariance.empty()) {
        std::cout << "A (" << e.covariance_source << "):";
        for (double v : e.covariance) std::cout << " " << v;
        std::cout << "\n";
      }
    } else if (test_cmd->parsed()) {
      const auto reports = run_tests(c, dir);
      std::cout << format_table(reports);
      return all_pass(reports) ? 0 : 1;
    } else if (certify_cmd->parsed()) {
      fs::create_directories(dir);
      const auto cert = certify(c, dir);
      std::cout << to_string(cert.verdict) << "  residual " << cert.residual << " (threshold " << cert.threshold
                << ", " << cert.products << " products)\n"
                << cert.note << "\n";
    } else if (report_cmd->parsed()) {
      std::cout << report(c, dir);
    }
  } catch (const SchemaError& e) {
    std::cerr << "hyperwind: " << e.what() << "\n";
    return 2;
  } catch (const StageOrderError& e) {
    std::cerr << "hyperwind: stage order: " << e.what() << "\n";
    return 2;
  } catch (const DigestMismatch& e) {
    std::cerr << "hyperwind: digest mismatch: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hyperwind: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
