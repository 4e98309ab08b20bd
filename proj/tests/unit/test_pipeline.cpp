#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "hyperwind/config.hpp"
#include "hyperwind/error.hpp"
#include "hyperwind/io.hpp"
#include "hyperwind/pipeline.hpp"

using namespace hyperwind;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "name": "small",
  "model": {"kind": "tree", "rank": 2},
  "measure": "simple",
  "seed": 77,
  "paths": 300,
  "horizon": 1200,
  "stride": 100,
  "stopping": [50, 100],
  "references": ["u", "v"],
  "ray_times": [100, 400],
  "tracking": true,
  "calibration": {"paths": 200, "horizon": 500, "threshold": 50, "tracking_horizon": 400},
  "estimate": {"formula_n": 1200, "ray_time": 400},
  "tests": ["escape", "lln", "routes"]
})";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hyperwind-pipeline-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Pipeline, StageOrder) {
  const auto c = parse_config(kSmall);
  const auto dir = scratch("order");
  EXPECT_THROW(estimate(c, dir), StageOrderError);
  EXPECT_THROW(run_tests(c, dir), StageOrderError);
  EXPECT_THROW(report(c, dir), StageOrderError);
  simulate(c, dir, 1);
  EXPECT_THROW(run_tests(c, dir), StageOrderError);
  EXPECT_THROW(report(c, dir), StageOrderError);
  estimate(c, dir);
  EXPECT_THROW(report(c, dir), StageOrderError);
  run_tests(c, dir);
  EXPECT_NO_THROW(report(c, dir));
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
  EXPECT_TRUE(fs::exists(dir / "plots" / "winding_trajectories.svg"));
  fs::remove_all(dir);
}

TEST(Pipeline, DeterministicEndToEnd) {
  const auto c = parse_config(kSmall);
  const auto a = scratch("det-a"), b = scratch("det-b");
  const auto ra = run_pipeline(c, a, 1);
  const auto rb = run_pipeline(c, b, 2);
  EXPECT_EQ(load_manifest(a).digest(), load_manifest(b).digest());
  EXPECT_EQ(reports_json(ra), reports_json(rb));
  EXPECT_EQ(read_text_file(a / "estimates.json"), read_text_file(b / "estimates.json"));
  for (const auto& r : ra) EXPECT_TRUE(r.pass) << r.name << " " << r.statistic;
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Pipeline, DigestMismatches) {
  auto c = parse_config(kSmall);
  const auto dir = scratch("digest");
  simulate(c, dir, 1);
  {
    std::ofstream out(dir / "checkpoints.csv", std::ios::app);
    out << "0,0,0,0,0,0,0\n";
  }
  EXPECT_THROW(estimate(c, dir), DigestMismatch);
  simulate(c, dir, 1);
  auto other = c;
  other.paths = 301;
  EXPECT_THROW(estimate(other, dir), DigestMismatch);
  estimate(c, dir);
  auto retuned = c;
  retuned.estimate.ray_time = 100;
  EXPECT_THROW(run_tests(retuned, dir), DigestMismatch);
  // Changing only a tolerance keeps the dataset and estimates valid.
  auto loose = c;
  loose.tolerances.escape_abs = 0.05;
  EXPECT_NO_THROW(run_tests(loose, dir));
  fs::remove_all(dir);
}

TEST(Pipeline, CertifyExampleMeasure) {
  const auto dir = scratch("certify");
  fs::create_directories(dir);
  const auto cert = certify(load_preset("example-anu"), dir);
  EXPECT_EQ(cert.verdict, Verdict::nondegenerate);
  EXPECT_TRUE(fs::exists(dir / "certificate.json"));
  fs::remove_all(dir);
}

TEST(Pipeline, SimpleWalkOracle) {
  EXPECT_DOUBLE_EQ(*simple_walk_escape_rate(load_preset("srw-f2")), 0.5);
  EXPECT_FALSE(simple_walk_escape_rate(load_preset("example-anu")));
  auto c = parse_config(R"({"name": "f3", "model": {"kind": "tree", "rank": 3}, "measure": "simple",
    "seed": 1, "paths": 1, "horizon": 10})");
  EXPECT_DOUBLE_EQ(*simple_walk_escape_rate(c), 4.0 / 6.0);
}

TEST(Pipeline, ExactCoreSuite) {
  Tolerances t;
  t.exact_instances = 2000;
  const auto r = exact_core_test(t, 5);
  EXPECT_TRUE(r.pass) << r.note;
  EXPECT_GE(r.samples, 2000u);
}

TEST(Pipeline, PlaneGeometry) {
  const auto r = plane_geometry_test(load_preset("schottky-symmetric"));
  EXPECT_TRUE(r.pass) << r.note;
}

TEST(Pipeline, CriteriaTable) {
  const auto& table = acceptance_criteria();
  ASSERT_EQ(table.size(), 12u);
  std::map<std::string, std::vector<TestReport>> reports;
  TestReport ok;
  ok.name = "exact-core";
  ok.pass = true;
  reports["exact-core"] = {ok};
  const auto results = evaluate_criteria(reports);
  ASSERT_EQ(results.size(), 12u);
  EXPECT_TRUE(results[0].pass);
  // Criteria without reports fail.
  EXPECT_FALSE(results[1].pass);
}
