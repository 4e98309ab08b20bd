#include "hyperwind/plane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "hyperwind/error.hpp"

namespace hyperwind::plane {

DiskPoint DiskPoint::checked(Complex z) {
  if (!(std::abs(z) < 1.0 - kInteriorMargin)) throw DomainError("point is not inside the open disk");
  return DiskPoint{z};
}

CircleBoundaryPoint CircleBoundaryPoint::from_angle(double theta) {
  return CircleBoundaryPoint{std::polar(1.0, theta)};
}

CircleBoundaryPoint CircleBoundaryPoint::checked(Complex xi) {
  if (std::abs(std::abs(xi) - 1.0) > 1e-12) throw DomainError("boundary point is not on the unit circle");
  return CircleBoundaryPoint{xi / std::abs(xi)};
}

Isometry::Isometry(Complex alpha, Complex beta, Word label)
    : alpha_(alpha), beta_(beta), label_(std::move(label)) {
  renormalize();
}

Isometry Isometry::from_real(double a, double b, double c, double d, Word label) {
  const double det = a * d - b * c;
  if (!(det > 0.0)) throw DomainError("SL(2,R) generator must have positive determinant");
  const Complex alpha(0.5 * (a + d), 0.5 * (b - c));
  const Complex beta(0.5 * (a - d), -0.5 * (b + c));
  return Isometry(alpha, beta, std::move(label));
}

Isometry Isometry::rotation(double theta) { return Isometry(std::polar(1.0, 0.5 * theta), Complex(0, 0), Word{}); }

Isometry Isometry::translation(double theta, double length) {
  return Isometry(Complex(std::cosh(0.5 * length), 0.0), std::polar(std::sinh(0.5 * length), theta), Word{});
}

Isometry Isometry::with_label(Word label) const {
  Isometry g = *this;
  g.label_ = std::move(label);
  return g;
}

std::array<double, 4> Isometry::real_matrix() const {
  return {alpha_.real() + beta_.real(), alpha_.imag() - beta_.imag(), -alpha_.imag() - beta_.imag(),
          alpha_.real() - beta_.real()};
}

void Isometry::renormalize() {
  const double det = determinant();
  if (!(det > 0.0)) throw NumericalInstability("isometry lost its SU(1,1) determinant");
  const double s = 1.0 / std::sqrt(det);
  alpha_ *= s;
  beta_ *= s;
  chain_ = 0;
}

Isometry Isometry::inverse() const {
  Isometry g;
  g.alpha_ = std::conj(alpha_);
  g.beta_ = -beta_;
  g.label_ = invert(label_);
  g.chain_ = chain_;
  return g;
}

Isometry Isometry::operator*(const Isometry& rhs) const {
  Isometry g;
  g.alpha_ = alpha_ * rhs.alpha_ + beta_ * std::conj(rhs.beta_);
  g.beta_ = alpha_ * rhs.beta_ + beta_ * std::conj(rhs.alpha_);
  g.label_ = multiply(label_, rhs.label_);
  g.chain_ = chain_ + rhs.chain_ + 1;
  if (g.chain_ >= kRenormalizeChain) g.renormalize();
  return g;
}

Complex Isometry::apply(Complex z) const { return (alpha_ * z + beta_) / (std::conj(beta_) * z + std::conj(alpha_)); }

Complex Isometry::apply_boundary(Complex xi) const {
  const Complex w = apply(xi);
  return w / std::abs(w);
}

DiskPoint mobius_apply(const Isometry& g, DiskPoint z) {
  const Complex w = g.apply(z.z);
  if (!(std::abs(w) < 1.0 - kInteriorMargin))
    throw NumericalInstability("Mobius image left the disk interior");
  return DiskPoint{w};
}

CircleBoundaryPoint mobius_apply(const Isometry& g, CircleBoundaryPoint xi) {
  return CircleBoundaryPoint{g.apply_boundary(xi.xi)};
}

double hyp_distance(DiskPoint z1, DiskPoint z2) {
  const double r = std::abs((z1.z - z2.z) / (1.0 - std::conj(z1.z) * z2.z));
  return 2.0 * std::atanh(std::min(r, 1.0));
}

double busemann_disk(CircleBoundaryPoint xi, DiskPoint z) {
  const double gap = std::abs(xi.xi - z.z);
  if (gap < 1e-12) throw DomainError("horofunction evaluated at its own boundary point");
  return 2.0 * std::log(gap) - std::log1p(-std::norm(z.z));
}

DiskPoint ray_point_disk(CircleBoundaryPoint xi, double t) {
  if (t < 0.0) throw DomainError("ray time must be non-negative");
  const double r = std::tanh(0.5 * t);
  if (!(r < 1.0 - kInteriorMargin)) throw NumericalInstability("ray time beyond double precision reach");
  return DiskPoint{r * xi.xi};
}

double translation_length(const Isometry& g) {
  const double tr = std::abs(g.trace()) / std::sqrt(g.determinant());
  if (tr <= 2.0 + 1e-9) throw DomainError("translation length needs a hyperbolic isometry (|tr| > 2)");
  return 2.0 * std::acosh(0.5 * tr);
}

double busemann_cocycle_disk(const Isometry& g, CircleBoundaryPoint xi) {
  return std::log(std::norm(xi.xi * g.alpha() + g.beta()) / g.determinant());
}

double orbit_distance(const Isometry& g) {
  return 2.0 * std::acosh(std::max(1.0, std::abs(g.alpha()) / std::sqrt(g.determinant())));
}

Complex PingPongDisk::center() const { return std::polar(std::sqrt(1.0 + radius * radius), angle); }

std::pair<Complex, Complex> PingPongDisk::endpoints() const {
  const double half = std::atan(radius);
  return {std::polar(1.0, angle - half), std::polar(1.0, angle + half)};
}

bool PingPongDisk::contains(Complex z, double tol) const { return std::abs(z - center()) <= radius + tol; }

double distance_to_half_plane(const PingPongDisk& disk, DiskPoint z) {
  if (disk.contains(z.z)) return 0.0;
  const auto [e1, e2] = disk.endpoints();
  auto recentre = [&](Complex w) { return (w - z.z) / (1.0 - std::conj(z.z) * w); };
  const double spread = std::abs(std::arg(recentre(e2) / recentre(e1)));
  const double s = std::sin(0.5 * spread);
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  return std::acosh(std::max(1.0, 1.0 / s));
}

SchottkyModel::SchottkyModel(std::vector<Isometry> generators, std::vector<PingPongDisk> disks)
    : generators_(std::move(generators)), disks_(std::move(disks)) {
  if (generators_.empty()) throw DomainError("Schottky model needs generators");
  if (disks_.size() != 2 * generators_.size())
    throw DomainError("Schottky model needs one disk per letter (2k disks)");
  letters_.resize(2 * generators_.size());
  for (std::size_t g = 0; g < generators_.size(); ++g) {
    const Letter plus(static_cast<int>(g) + 1, 1);
    Word w;
    w.push_back(plus);
    generators_[g] = generators_[g].with_label(w);
    letters_[static_cast<std::size_t>(plus.dense_index())] = generators_[g];
    letters_[static_cast<std::size_t>(plus.inverse().dense_index())] = generators_[g].inverse();
  }
}

SchottkyModel SchottkyModel::symmetric(std::size_t rank, double radius) {
  const double c = std::sqrt(1.0 + radius * radius);
  const double inner = std::log((1.0 + c - radius) / (1.0 - c + radius));
  std::vector<Isometry> gens;
  std::vector<PingPongDisk> disks;
  for (std::size_t j = 0; j < rank; ++j) {
    const double phi = std::numbers::pi * static_cast<double>(j) / static_cast<double>(rank);
    gens.push_back(Isometry::translation(phi, 2.0 * inner));
    disks.push_back(PingPongDisk{phi, radius});
    disks.push_back(PingPongDisk{phi + std::numbers::pi, radius});
  }
  return SchottkyModel(std::move(gens), std::move(disks));
}

Isometry SchottkyModel::evaluate(const Word& w) const {
  Isometry g = Isometry::identity();
  for (Letter l : w) g = g * letter(l);
  return g;
}

Complex SchottkyModel::apply(const Word& w, Complex z) const {
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) z = letter(*it).apply(z);
  return z;
}

SchottkyReport validate_schottky(const SchottkyModel& model, std::size_t samples_per_circle, bool strict) {
  SchottkyReport report;
  const auto& disks = model.disks();
  auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

  for (std::size_t g = 0; g < model.rank(); ++g) {
    const auto& iso = model.generators()[g];
    if (std::abs(iso.trace()) <= 2.0 + 1e-9)
      fail("generator " + std::to_string(g + 1) + " is not hyperbolic (|tr| <= 2)");
  }
  for (std::size_t i = 0; i < disks.size(); ++i) {
    if (!(disks[i].radius > 0.0)) fail("disk " + std::to_string(i) + " has non-positive radius");
    for (std::size_t j = i + 1; j < disks.size(); ++j)
      if (std::abs(disks[i].center() - disks[j].center()) <= disks[i].radius + disks[j].radius)
        fail("disks " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
  }
  if (!report.violations.empty()) {
    if (strict) throw DomainError("Schottky validation failed: " + report.violations.front());
    return report;
  }

  // Each letter must send the complement of its inverse disk into its own
  // disk. Möbius maps send circles to circles, so boundary arcs plus one
  // interior point (the origin) certify the inclusion.
  auto arc_samples = [&](const PingPongDisk& d) {
    std::vector<Complex> pts;
    const double half_arc = 0.5 * std::numbers::pi - std::atan(d.radius);
    for (std::size_t i = 0; i < samples_per_circle; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(samples_per_circle);
      const double psi = d.angle + std::numbers::pi + half_arc * (2.0 * u - 1.0);
      pts.push_back(d.center() + std::polar(d.radius, psi));
    }
    return pts;
  };
  for (std::size_t g = 0; g < model.rank(); ++g) {
    for (int sign : {1, -1}) {
      const Letter s(static_cast<int>(g) + 1, sign);
      const auto& iso = model.letter(s);
      const auto& target = model.disk(s);
      std::vector<Complex> pts{Complex(0, 0)};
      for (std::size_t i = 0; i < disks.size(); ++i)
        for (Complex p : arc_samples(disks[i])) pts.push_back(p);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const Complex w = iso.apply(pts[k]);
        ++report.samples_checked;
        if (!target.contains(w, 1e-9)) {
          fail("ping-pong violated by letter " + std::string(sign > 0 ? "+" : "-") + std::to_string(g + 1) +
               " at sample " + std::to_string(k));
          break;
        }
      }
    }
  }
  report.pass = report.violations.empty();
  if (strict && !report.pass) throw DomainError("Schottky validation failed: " + report.violations.front());
  return report;
}

namespace {

struct SearchNode {
  double bound;
  Word word;
  Complex local;  // word^-1 . z
  bool operator>(const SearchNode& o) const { return bound > o.bound; }
};

}  // namespace

OrbitSearchResult nearest_orbit_search(const SchottkyModel& model, DiskPoint z, std::size_t depth) {
  constexpr double kTie = 1e-12;
  std::priority_queue<SearchNode, std::vector<SearchNode>, std::greater<>> open;
  open.push(SearchNode{0.0, Word{}, z.z});

  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  Word best_word;
  bool horizon_hit = false;
  double horizon_bound = std::numeric_limits<double>::infinity();
  double pruned_bound = std::numeric_limits<double>::infinity();

  while (!open.empty()) {
    SearchNode node = open.top();
    if (node.bound > best + kTie * std::max(1.0, best)) {
      pruned_bound = node.bound;
      break;
    }
    open.pop();
    const double dist = 2.0 * std::atanh(std::min(std::abs(node.local), 1.0));
    const double tie = kTie * std::max(1.0, std::min(dist, best));
    if (dist < best - tie) {
      second = best;
      best = dist;
      best_word = node.word;
    } else if (dist <= best + tie) {
      if (shortlex_less(node.word, best_word)) best_word = node.word;
    } else {
      second = std::min(second, dist);
    }

    const bool at_horizon = node.word.size() >= depth;
    for (std::size_t g = 0; g < model.rank(); ++g) {
      for (int sign : {1, -1}) {
        const Letter s(static_cast<int>(g) + 1, sign);
        if (!node.word.empty() && node.word.back().cancels(s)) continue;
        const double lb =
            std::max(node.bound, distance_to_half_plane(model.disk(s), DiskPoint{node.local}));
        if (at_horizon) {
          horizon_bound = std::min(horizon_bound, lb);
          horizon_hit = true;
          continue;
        }
        Word child = node.word;
        child.push_back(s);
        open.push(SearchNode{lb, std::move(child), model.letter(s.inverse()).apply(node.local)});
      }
    }
  }

  if (best_word.size() >= depth && depth > 0)
    throw InconclusiveDepth("nearest orbit point lies on the search depth " + std::to_string(depth));
  if (horizon_hit && horizon_bound <= best + kTie * std::max(1.0, best))
    throw InconclusiveDepth("an unexplored subtree beyond depth " + std::to_string(depth) +
                            " may hold a nearer orbit point");

  OrbitSearchResult result;
  result.element = model.evaluate(best_word);
  result.distance = best;
  result.gap = std::min(second, pruned_bound) - best;
  return result;
}

Isometry nearest_orbit_element(const SchottkyModel& model, DiskPoint z, std::size_t depth) {
  return nearest_orbit_search(model, z, depth).element;
}

AbelianVector winding_at(const SchottkyModel& model, const Projection& pi, DiskPoint z, std::size_t initial_depth) {
  std::size_t depth = std::max<std::size_t>(initial_depth, 2);
  for (;;) {
    try {
      return abelianize(nearest_orbit_element(model, z, depth).label(), pi);
    } catch (const InconclusiveDepth&) {
      if (depth > 4096) throw;
      depth *= 2;
    }
  }
}

void ScaledIsometry::right_multiply(const Isometry& g) {
  const Complex a = alpha_ * g.alpha() + beta_ * std::conj(g.beta());
  const Complex b = alpha_ * g.beta() + beta_ * std::conj(g.alpha());
  alpha_ = a;
  beta_ = b;
  normalize();
  if (++chain_ >= kRenormalizeChain) {
    // Restore |alpha|^2 - |beta|^2 = e^{-2 log_scale}.
    const double target = std::sqrt(std::max(0.0, -std::expm1(-2.0 * log_scale_)));
    const double mod = std::abs(beta_);
    if (mod > 0.0) beta_ *= target / mod;
    chain_ = 0;
  }
}

void ScaledIsometry::normalize() {
  const double r = std::abs(alpha_);
  alpha_ /= r;
  beta_ /= r;
  log_scale_ += std::log(r);
}

double ScaledIsometry::distance_from_origin() const {
  const double ls = std::max(0.0, log_scale_);
  return 2.0 * (ls + std::log1p(std::sqrt(std::max(0.0, -std::expm1(-2.0 * ls)))));
}

double ScaledIsometry::busemann(Complex xi) const {
  return 2.0 * log_scale_ + 2.0 * std::log(std::abs(xi * std::conj(alpha_) - beta_));
}

Complex ScaledIsometry::direction() const {
  const Complex p = beta_ / std::conj(alpha_);
  const double m = std::abs(p);
  return m > 0.0 ? p / m : Complex(1.0, 0.0);
}

}  // namespace hyperwind::plane
