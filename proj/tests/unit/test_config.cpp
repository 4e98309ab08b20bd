#include <gtest/gtest.h>

#include "hyperwind/config.hpp"
#include "hyperwind/error.hpp"

using namespace hyperwind;

namespace {

const char* kMinimal = R"({
  "name": "mini",
  "model": {"kind": "tree", "rank": 2},
  "measure": "simple",
  "seed": 3,
  "paths": 10,
  "horizon": 100
})";

std::string schema_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const SchemaError& e) {
    return e.key();
  }
  return "<accepted>";
}

}  // namespace

TEST(Config, MinimalTree) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.name, "mini");
  EXPECT_EQ(c.rank, 2u);
  EXPECT_EQ(c.measure.size(), 4u);
  const auto spec = c.walk_spec();
  EXPECT_EQ(spec.measure.size(), 4u);
  EXPECT_EQ(spec.projection.dim, 2u);
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_EQ(schema_key(R"({"name": "x", "model": {"kind": "tree", "rank": 2}, "measure": "simple",
    "seed": 1, "paths": 1, "horizon": 10, "colour": 3})"),
            "colour");
  EXPECT_EQ(schema_key(R"({"name": "x", "model": {"kind": "tree", "rank": 2, "genus": 1}, "measure": "simple",
    "seed": 1, "paths": 1, "horizon": 10})"),
            "model.genus");
}

TEST(Config, NamesOffendingKeys) {
  EXPECT_EQ(schema_key(R"({"name": "x", "model": {"kind": "tree", "rank": 2},
    "measure": [{"word": "u", "probability": -0.5}, {"word": "v", "probability": 1.5}],
    "seed": 1, "paths": 1, "horizon": 10})"),
            "measure");
  EXPECT_EQ(schema_key(R"({"name": "x", "model": {"kind": "tree"}, "measure": "simple",
    "seed": 1, "paths": 1, "horizon": 10})"),
            "model.rank");
  EXPECT_EQ(schema_key(R"({"name": "x", "model": {"kind": "torus", "rank": 2}, "measure": "simple",
    "seed": 1, "paths": 1, "horizon": 10})"),
            "model.kind");
  EXPECT_EQ(schema_key(R"({"name": "x", "model": {"kind": "tree", "rank": 2}, "measure": "simple",
    "seed": 1, "paths": 1, "horizon": 10, "tests": ["bogus"]})"),
            "tests");
  EXPECT_EQ(schema_key(R"({"name": "x", "model": {"kind": "plane", "rank": 2}, "measure": "simple",
    "seed": 1, "paths": 1, "horizon": 10})"),
            "model.schottky");
  EXPECT_EQ(schema_key("{not json"), "<root>");
}

TEST(Config, ExactProbabilities) {
  const auto c = parse_config(R"({"name": "x", "model": {"kind": "tree", "rank": 2},
    "measure": [{"word": "u", "probability": "1/3"}, {"word": "uv", "probability": "1/3"},
                {"word": "uV", "probability": "1/3"}],
    "seed": 1, "paths": 1, "horizon": 10})");
  const auto spec = c.walk_spec();
  EXPECT_TRUE(spec.measure.exact());
  EXPECT_EQ(*spec.measure.atoms()[1].exact, Rational(1, 3));
}

TEST(Config, CanonicalJsonRoundTrip) {
  const auto c = load_preset("example-anu");
  const auto text = canonical_json(c);
  EXPECT_EQ(canonical_json(parse_config(text)), text);
}

TEST(Config, BundledPresets) {
  const auto names = preset_names();
  for (const char* n :
       {"exact-core", "srw-f2", "example-anu", "srw-f2-gr", "srw-f2-block10", "srw-f2-lil", "schottky-symmetric"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  const auto srw = load_preset("srw-f2");
  EXPECT_EQ(srw.walk_spec().measure.size(), 4u);
  EXPECT_EQ(srw.tree_references().size(), 5u);
  const auto anu = load_preset("example-anu");
  EXPECT_EQ(anu.walk_spec().measure.size(), 3u);
  const auto plane = load_preset("schottky-symmetric");
  EXPECT_EQ(plane.kind, ModelKind::plane);
  EXPECT_EQ(plane.plane_references().size(), 2u);
  EXPECT_THROW(load_preset("no-such-preset"), SchemaError);
}

TEST(Config, ExitWindowsExpand) {
  const auto c = load_preset("srw-f2-gr");
  const auto w = c.exit_windows();
  ASSERT_EQ(w.size(), 9u);
  EXPECT_DOUBLE_EQ(w[0].k, 1.0);
  EXPECT_DOUBLE_EQ(w[0].s, 50.0);
}

TEST(Config, ToleranceOverrides) {
  Tolerances t;
  apply_tolerances(t, R"({"escape": {"abs": 0.02}, "clt": {"alpha": 0.05}})");
  EXPECT_DOUBLE_EQ(t.escape_abs, 0.02);
  EXPECT_DOUBLE_EQ(t.clt.alpha, 0.05);
  EXPECT_THROW(apply_tolerances(t, R"({"clt": {"alpha": 2}})"), SchemaError);
  EXPECT_THROW(apply_tolerances(t, R"({"nonsense": 1})"), SchemaError);
  const auto d = default_tolerances();
  EXPECT_EQ(d.version, "1");
  EXPECT_DOUBLE_EQ(d.lln.abs_tolerance, 0.02);
}
