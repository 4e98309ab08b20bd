#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hyperwind/error.hpp"
#include "hyperwind/plane.hpp"

using namespace hyperwind;
using namespace hyperwind::plane;

namespace {

// Upper half-plane distance, computed from SL(2,R) matrices acting on i.
double uhp_distance_from_i(const std::array<double, 4>& m) {
  const auto [a, b, c, d] = m;
  const std::complex<double> w = (a * std::complex<double>(0, 1) + b) / (c * std::complex<double>(0, 1) + d);
  return std::acosh(1.0 + std::norm(w - std::complex<double>(0, 1)) / (2.0 * w.imag()));
}

// Busemann function as the limit d(z, r(T)) - T along the ray to xi.
double busemann_by_limit(Complex xi, Complex z) {
  const long double T = 24.0L;
  std::complex<long double> dir(xi.real(), xi.imag());
  dir /= std::abs(dir);
  const std::complex<long double> r = std::tanh(T / 2.0L) * dir;
  const std::complex<long double> zz(z.real(), z.imag());
  const long double q = std::abs(zz - r) / std::abs(1.0L - std::conj(r) * zz);
  return static_cast<double>(2.0L * std::atanh(q) - T);
}

}  // namespace

TEST(Plane, IsometryNormalization) {
  const auto g = Isometry::from_real(2.0, 1.0, 1.0, 1.0);
  EXPECT_NEAR(g.determinant(), 1.0, 1e-12);
  EXPECT_NEAR(g.trace(), 3.0, 1e-12);
  const auto id = g * g.inverse();
  EXPECT_NEAR(std::abs(id.apply(Complex(0.3, -0.2)) - Complex(0.3, -0.2)), 0.0, 1e-12);
  EXPECT_THROW(Isometry::from_real(1.0, 2.0, 2.0, 1.0), DomainError);
}

TEST(Plane, DistanceMatchesUpperHalfPlane) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = 0.5 + std::fabs(u(rng)), b = u(rng), c = u(rng);
    const double d = (1.0 + b * c) / a;
    const auto g = Isometry::from_real(a, b, c, d);
    const double expected = uhp_distance_from_i({a, b, c, d});
    EXPECT_NEAR(orbit_distance(g), expected, 1e-9 * std::max(1.0, expected));
    EXPECT_NEAR(hyp_distance(DiskPoint::origin(), mobius_apply(g, DiskPoint::origin())), expected, 1e-8);
  }
}

TEST(Plane, TranslationLength) {
  const auto g = Isometry::translation(0.7, 3.0);
  EXPECT_NEAR(translation_length(g), 3.0, 1e-12);
  EXPECT_NEAR(orbit_distance(g), 3.0, 1e-12);
  EXPECT_NEAR(translation_length(Isometry::from_real(2.0, 0.0, 0.0, 0.5)), 2.0 * std::log(2.0), 1e-12);
}

TEST(Plane, BusemannMatchesLimit) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi), rad(0.0, 0.9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto xi = CircleBoundaryPoint::from_angle(ang(rng));
    const Complex z = std::polar(rad(rng), ang(rng));
    EXPECT_NEAR(busemann_disk(xi, DiskPoint{z}), busemann_by_limit(xi.xi, z), 1e-6);
  }
}

TEST(Plane, CocycleRelationAndBound) {
  const auto model = SchottkyModel::symmetric(2, 0.8);
  Alphabet ab(2);
  const auto xi = CircleBoundaryPoint::from_angle(0.4);
  for (const char* a : {"u", "uv", "VuU", "uuvV"}) {
    for (const char* b : {"v", "Uv", "uvu"}) {
      const auto g1 = model.evaluate(ab.parse(a));
      const auto g2 = model.evaluate(ab.parse(b));
      const double lhs = busemann_cocycle_disk(g1 * g2, xi);
      const double rhs = busemann_cocycle_disk(g1, mobius_apply(g2, xi)) + busemann_cocycle_disk(g2, xi);
      EXPECT_NEAR(lhs, rhs, 1e-8);
      EXPECT_LE(std::fabs(busemann_cocycle_disk(g1, xi)), orbit_distance(g1) + 1e-9);
    }
  }
}

TEST(Plane, CocycleMatchesBusemannOfInverseOrbit) {
  const auto g = Isometry::from_real(1.5, 0.3, -0.4, (1.0 - 0.3 * 0.4) / 1.5);
  const auto xi = CircleBoundaryPoint::from_angle(2.1);
  const auto p = mobius_apply(g.inverse(), DiskPoint::origin());
  EXPECT_NEAR(busemann_cocycle_disk(g, xi), busemann_by_limit(xi.xi, p.z), 1e-6);
}

TEST(Plane, SymmetricSchottkyPingPong) {
  const auto model = SchottkyModel::symmetric(2, 0.8);
  const auto report = validate_schottky(model);
  EXPECT_TRUE(report.pass);
  EXPECT_GT(report.samples_checked, 0u);
  // Overlapping disks violate the ping-pong condition.
  const auto bad = SchottkyModel::symmetric(2, 1.5);
  EXPECT_FALSE(validate_schottky(bad).pass);
  EXPECT_THROW(validate_schottky(bad, 64, true), DomainError);
}

TEST(Plane, NearestOrbitElement) {
  const auto model = SchottkyModel::symmetric(2, 0.8);
  Alphabet ab(2);
  const auto g = model.evaluate(ab.parse("uv"));
  const auto z = mobius_apply(g, DiskPoint::origin());
  const auto found = nearest_orbit_search(model, z, 6);
  EXPECT_EQ(ab.format(found.element.label()), "uv");
  EXPECT_NEAR(found.distance, 0.0, 1e-9);
  const auto w = winding_at(model, Projection::canonical(2), z);
  EXPECT_EQ(w, (AbelianVector{1, 1}));
}

TEST(Plane, ScaledIsometryTracksLongProducts) {
  const auto model = SchottkyModel::symmetric(2, 0.8);
  const auto u = model.generators()[0];
  ScaledIsometry s;
  for (int i = 0; i < 400; ++i) s.right_multiply(u);
  EXPECT_NEAR(s.distance_from_origin(), 400.0 * translation_length(u), 1e-6 * 400.0);
  EXPECT_NEAR(std::arg(s.direction()), 0.0, 1e-9);
}
