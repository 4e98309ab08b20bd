#pragma once

// Fuchsian Schottky groups acting on the Poincare disk. Isometries carry
// both their SU(1,1) coefficients and the word they represent. Ping-pong
// regions are geodesic half-planes cut out by circles orthogonal to the
// unit circle.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperwind/group.hpp"

namespace hyperwind::plane {

using Complex = std::complex<double>;

inline constexpr double kInteriorMargin = 1e-12;

struct DiskPoint {
  Complex z;
  /// Rejects points outside the open disk (with the interior margin).
  static DiskPoint checked(Complex z);
  static DiskPoint origin() { return DiskPoint{Complex(0.0, 0.0)}; }
};

struct CircleBoundaryPoint {
  Complex xi;
  static CircleBoundaryPoint from_angle(double theta);
  static CircleBoundaryPoint checked(Complex xi);
  double angle() const { return std::arg(xi); }
};

/// z -> (alpha z + beta) / (conj(beta) z + conj(alpha)), |alpha|^2 - |beta|^2 = 1,
/// identified with its negative.
class Isometry {
 public:
  Isometry() = default;
  Isometry(Complex alpha, Complex beta, Word label);

  /// From a real SL(2,R) matrix acting on the upper half-plane, conjugated
  /// into the disk by the Cayley map.
  static Isometry from_real(double a, double b, double c, double d, Word label = {});
  static Isometry identity() { return Isometry(Complex(1, 0), Complex(0, 0), Word{}); }
  static Isometry rotation(double theta);
  /// Translation by `length` along the diameter pointing at angle `theta`.
  static Isometry translation(double theta, double length);

  Complex alpha() const { return alpha_; }
  Complex beta() const { return beta_; }
  const Word& label() const { return label_; }
  Isometry with_label(Word label) const;

  /// (a, b, c, d) of the real SL(2,R) representative.
  std::array<double, 4> real_matrix() const;
  double trace() const { return 2.0 * alpha_.real(); }
  double determinant() const { return std::norm(alpha_) - std::norm(beta_); }

  Isometry inverse() const;
  Isometry operator*(const Isometry& rhs) const;
  Complex apply(Complex z) const;
  Complex apply_boundary(Complex xi) const;

 private:
  void renormalize();

  Complex alpha_{1.0, 0.0};
  Complex beta_{0.0, 0.0};
  Word label_;
  int chain_ = 0;
};

/// Renormalize after this many products.
inline constexpr int kRenormalizeChain = 32;

DiskPoint mobius_apply(const Isometry& g, DiskPoint z);
CircleBoundaryPoint mobius_apply(const Isometry& g, CircleBoundaryPoint xi);
double hyp_distance(DiskPoint z1, DiskPoint z2);
/// h_xi(z) = log(|xi - z|^2 / (1 - |z|^2)).
double busemann_disk(CircleBoundaryPoint xi, DiskPoint z);
DiskPoint ray_point_disk(CircleBoundaryPoint xi, double t);
double translation_length(const Isometry& g);

/// sigma(g, xi) = h_xi(g^-1 . o), evaluated from the coefficients so that it
/// stays accurate far from the origin.
double busemann_cocycle_disk(const Isometry& g, CircleBoundaryPoint xi);
/// d(o, g.o) from the coefficients.
double orbit_distance(const Isometry& g);

/// A circle orthogonal to the unit circle, centred in direction `angle`.
struct PingPongDisk {
  double angle = 0.0;
  double radius = 0.0;
  Complex center() const;
  /// Endpoints of the boundary geodesic on the unit circle.
  std::pair<Complex, Complex> endpoints() const;
  bool contains(Complex z, double tol = 0.0) const;
};

/// Distance from z to the half-plane cut out by the disk (0 inside).
double distance_to_half_plane(const PingPongDisk& disk, DiskPoint z);

class SchottkyModel {
 public:
  SchottkyModel() = default;
  /// `generators[g]` is generator g+1; `disks[2g]` belongs to the letter g+1,
  /// `disks[2g+1]` to its inverse.
  SchottkyModel(std::vector<Isometry> generators, std::vector<PingPongDisk> disks);

  /// Generators translating along k equally spaced diameters, disks of the
  /// given Euclidean radius.
  static SchottkyModel symmetric(std::size_t rank, double radius);

  std::size_t rank() const { return generators_.size(); }
  const std::vector<Isometry>& generators() const { return generators_; }
  const std::vector<PingPongDisk>& disks() const { return disks_; }
  const PingPongDisk& disk(Letter l) const { return disks_[static_cast<std::size_t>(l.dense_index())]; }
  const Isometry& letter(Letter l) const { return letters_[static_cast<std::size_t>(l.dense_index())]; }
  /// Letter-by-letter product.
  Isometry evaluate(const Word& w) const;
  /// Applies w to z by replaying letters right to left.
  Complex apply(const Word& w, Complex z) const;

 private:
  std::vector<Isometry> generators_;
  std::vector<PingPongDisk> disks_;
  std::vector<Isometry> letters_;
};

struct SchottkyReport {
  bool pass = false;
  std::vector<std::string> violations;
  std::size_t samples_checked = 0;
};

/// Throws DomainError carrying the first violation when `strict`.
SchottkyReport validate_schottky(const SchottkyModel& model, std::size_t samples_per_circle = 64,
                                 bool strict = false);

struct OrbitSearchResult {
  Isometry element;
  double distance = 0.0;
  /// Gap to the runner-up candidate (infinity if none was within reach).
  double gap = 0.0;
};

/// The g minimizing d(z, g.o) over |g| <= depth, ties broken shortlex.
OrbitSearchResult nearest_orbit_search(const SchottkyModel& model, DiskPoint z, std::size_t depth);
Isometry nearest_orbit_element(const SchottkyModel& model, DiskPoint z, std::size_t depth);

/// Locally bounded equivariant winding: pi of the nearest orbit element.
/// Retries with doubled depth on InconclusiveDepth.
AbelianVector winding_at(const SchottkyModel& model, const Projection& pi, DiskPoint z,
                         std::size_t initial_depth = 8);

/// An isometry stored as e^{log_scale} (alpha, beta) with |alpha| = 1, so
/// long products neither overflow nor lose the distance to the origin.
class ScaledIsometry {
 public:
  ScaledIsometry() = default;
  void right_multiply(const Isometry& g);
  double distance_from_origin() const;
  /// h_xi(g.o).
  double busemann(Complex xi) const;
  /// Direction of g.o, which converges to the limit point.
  Complex direction() const;
  double log_scale() const { return log_scale_; }

 private:
  void normalize();
  Complex alpha_{1.0, 0.0};
  Complex beta_{0.0, 0.0};
  double log_scale_ = 0.0;
  int chain_ = 0;
};

}  // namespace hyperwind::plane
