#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "hyperwind/dataset.hpp"
#include "hyperwind/error.hpp"
#include "hyperwind/io.hpp"

using namespace hyperwind;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("hyperwind-test-" + name);
  fs::remove_all(dir);
  return dir;
}

Dataset sample_dataset() {
  WalkSpec spec;
  spec.measure = StepMeasure::simple(2);
  spec.projection = Projection::canonical(2);
  Alphabet ab(2);
  ObservationPlan p;
  p.horizon = 400;
  p.stride = 50;
  p.stopping = StoppingSpec{{20.0, 60.0, 1000.0}, 0.5};
  p.stabilization = StabilizationParams{0.5, 0.87};
  p.tree_refs = {BoundaryWord::periodic(Word{}, ab.parse("u")), BoundaryWord::periodic(Word{}, ab.parse("v"))};
  p.ray_times = {10, 50, 100};
  p.tracking = true;
  p.exits = {ExitWindow{1.0, 1.0, 5.0}, ExitWindow{1.0, 2.0, 5.0}};
  p.functional = {1.0, 0.0};
  p.drift = {0.0, 0.0};
  return batch_run(spec, p, 2024, 40, 2);
}

}  // namespace

TEST(Io, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xCBF29CE484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xAF63DC4C8601EC8CULL);
  EXPECT_EQ(hex_digest(0xABCULL), "0000000000000abc");
}

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Io, DatasetRoundTripIsExact) {
  const auto data = sample_dataset();
  const auto dir = scratch("roundtrip");
  const auto files = write_dataset(data, dir);
  EXPECT_EQ(files.digests.size(), 5u);
  const auto back = read_dataset(dir, data.master_seed);
  ASSERT_EQ(back.paths.size(), data.paths.size());
  for (std::size_t i = 0; i < data.paths.size(); ++i) EXPECT_EQ(back.paths[i], data.paths[i]) << "path " << i;
  EXPECT_EQ(back.escape, data.escape);
  EXPECT_EQ(back.winding, data.winding);
  EXPECT_EQ(digest_dataset(dir).combined, files.combined);
  fs::remove_all(dir);
}

TEST(Io, DigestDetectsEdits) {
  const auto data = sample_dataset();
  const auto dir = scratch("edit");
  const auto files = write_dataset(data, dir);
  {
    std::ofstream out(dir / "rays.csv", std::ios::app);
    out << "0,1,0,0\n";
  }
  const auto after = digest_dataset(dir);
  EXPECT_NE(after.combined, files.combined);
  EXPECT_NE(after.digests.at("rays.csv"), files.digests.at("rays.csv"));
  EXPECT_EQ(after.digests.at("paths.csv"), files.digests.at("paths.csv"));
  fs::remove_all(dir);
}

TEST(Io, MissingFileIsAStageOrderError) {
  EXPECT_THROW(read_text_file(scratch("missing") / "estimates.json"), StageOrderError);
  EXPECT_THROW(read_dataset(scratch("missing"), 1), StageOrderError);
}

TEST(Io, WriteTextCreatesDirectories) {
  const auto dir = scratch("nested");
  write_text(dir / "a" / "b.txt", "hello");
  EXPECT_EQ(read_text_file(dir / "a" / "b.txt"), "hello");
  EXPECT_EQ(file_digest(dir / "a" / "b.txt"), text_digest("hello"));
  fs::remove_all(dir);
}
