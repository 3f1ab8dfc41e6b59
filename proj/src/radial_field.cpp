#include "pauli_annulus/radial_field.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/roots.hpp>

#include "pauli_annulus/csv.hpp"
#include "pauli_annulus/errors.hpp"

namespace pauli_annulus {

AnnulusGeometry::AnnulusGeometry(double inner, double outer) : rho1(inner), rho2(outer) {
  if (!(std::isfinite(inner) && std::isfinite(outer) && inner > 0.0 && inner < outer)) {
    std::ostringstream msg;
    msg << "annulus radii must satisfy 0 < rho1 < rho2 (got rho1=" << inner << ", rho2=" << outer << ")";
    throw DomainError(msg.str());
  }
}

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::constant: return "constant";
    case FieldKind::polynomial: return "polynomial";
    case FieldKind::table: return "table";
  }
  return "unknown";
}

RadialField::RadialField(const AnnulusGeometry& geom, FieldKind kind, std::function<double(double)> profile)
    : geom_(geom), kind_(kind), profile_(std::move(profile)) {}

void RadialField::validate_positive(std::size_t samples) {
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= samples; ++i) {
    const double r = geom_.rho1 + geom_.width() * static_cast<double>(i) / static_cast<double>(samples);
    const double b = profile_(r);
    if (!std::isfinite(b) || b <= 0.0) {
      std::ostringstream msg;
      msg << "magnetic field must be strictly positive on the annulus; B(" << r << ") = " << b;
      throw DomainError(msg.str());
    }
    lowest = std::min(lowest, b);
  }
  b0_ = lowest;
}

RadialField RadialField::constant(const AnnulusGeometry& geom, double value) {
  if (!std::isfinite(value) || value <= 0.0) {
    std::ostringstream msg;
    msg << "magnetic field must be strictly positive; constant value = " << value;
    throw DomainError(msg.str());
  }
  RadialField field(geom, FieldKind::constant, [value](double) { return value; });
  field.params_ = {value};
  field.b0_ = value;
  return field;
}

RadialField RadialField::polynomial(const AnnulusGeometry& geom, std::vector<double> coefficients) {
  if (coefficients.empty()) throw DomainError("polynomial field needs at least one coefficient");
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw DomainError("polynomial field coefficients must be finite");
  }
  auto horner = [c = coefficients](double r) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + *it;
    return acc;
  };
  RadialField field(geom, FieldKind::polynomial, horner);
  field.params_ = std::move(coefficients);
  field.validate_positive(8192);
  return field;
}

RadialField RadialField::table(const AnnulusGeometry& geom, std::vector<double> r, std::vector<double> b) {
  if (r.size() != b.size()) throw DomainError("field table: r and B must have the same length");
  if (r.size() < 4) throw DomainError("field table: at least 4 samples are required");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!std::isfinite(r[i]) || !std::isfinite(b[i])) throw DomainError("field table: entries must be finite");
    if (i > 0 && !(r[i] > r[i - 1])) throw DomainError("field table: r must be strictly increasing");
    if (b[i] <= 0.0) {
      std::ostringstream msg;
      msg << "field table: magnetic field must be strictly positive; B[" << i << "] = " << b[i];
      throw DomainError(msg.str());
    }
  }
  if (r.front() > geom.rho1 || r.back() < geom.rho2) {
    throw DomainError("field table: r samples must cover [rho1, rho2]");
  }
  std::vector<double> rs = r;
  auto interp = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(r), std::move(b));
  RadialField field(geom, FieldKind::table, [interp](double x) { return (*interp)(x); });
  field.table_r_ = std::move(rs);
  field.validate_positive(8192);
  return field;
}

std::optional<double> RadialField::hole_flux() const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double rho = geom_.rho1;
  switch (kind_) {
    case FieldKind::constant:
      return std::numbers::pi * rho * rho * params_[0];
    case FieldKind::polynomial: {
      // 2*pi * sum_k a_k rho^{k+2}/(k+2)
      double acc = 0.0;
      for (std::size_t k = 0; k < params_.size(); ++k) {
        acc += params_[k] * std::pow(rho, static_cast<double>(k + 2)) / static_cast<double>(k + 2);
      }
      return two_pi * acc;
    }
    case FieldKind::table:
      return std::nullopt;
  }
  return std::nullopt;
}

ScalarPotential::ScalarPotential(AnnulusGeometry geom, std::vector<double> grid, std::vector<double> phi,
                                 std::vector<double> dphi, std::vector<double> field_samples)
    : geom_(geom),
      grid_(std::move(grid)),
      phi_(std::move(phi)),
      dphi_(std::move(dphi)),
      field_(std::move(field_samples)),
      spacing_(geom_.width() / static_cast<double>(grid_.size() - 1)) {}

std::size_t ScalarPotential::locate(double r) const {
  if (!(r >= geom_.rho1 && r <= geom_.rho2)) {
    std::ostringstream msg;
    msg << "radius " << r << " outside [" << geom_.rho1 << ", " << geom_.rho2 << "]";
    throw DomainError(msg.str());
  }
  const auto n = intervals();
  auto i = static_cast<std::size_t>((r - geom_.rho1) / spacing_);
  i = std::min(i, n - 1);
  // Guard against rounding in the division placing r one cell off.
  if (i > 0 && r < grid_[i]) --i;
  if (i + 1 < n && r > grid_[i + 1]) ++i;
  return i;
}

namespace {

double hermite(double t, double dx, double y0, double m0, double y1, double m1) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * dx * m0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * dx * m1;
}

}  // namespace

double ScalarPotential::phi_at(double r) const {
  const auto i = locate(r);
  if (r == grid_[i]) return phi_[i];
  if (r == grid_[i + 1]) return phi_[i + 1];
  const double t = (r - grid_[i]) / spacing_;
  return hermite(t, spacing_, phi_[i], dphi_[i], phi_[i + 1], dphi_[i + 1]);
}

double ScalarPotential::dphi_at(double r) const {
  const auto i = locate(r);
  if (r == grid_[i]) return dphi_[i];
  if (r == grid_[i + 1]) return dphi_[i + 1];
  const double t = (r - grid_[i]) / spacing_;
  return hermite(t, spacing_, dphi_[i], ddphi_node(i), dphi_[i + 1], ddphi_node(i + 1));
}

double phi_at(const ScalarPotential& pot, double r) { return pot.phi_at(r); }

namespace {

/// Derivative at x of the Lagrange interpolant through (xs, ys).
double lagrange_derivative(std::span<const double> xs, std::span<const double> ys, double x) {
  double total = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    double dl = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (k == j) continue;
      double term = 1.0 / (xs[j] - xs[k]);
      for (std::size_t l = 0; l < xs.size(); ++l) {
        if (l == j || l == k) continue;
        term *= (x - xs[l]) / (xs[j] - xs[l]);
      }
      dl += term;
    }
    total += ys[j] * dl;
  }
  return total;
}

}  // namespace

ScalarPotential solve_scalar_potential(const AnnulusGeometry& geom, const RadialField& field, std::size_t n_grid) {
  if (n_grid < 64) throw DomainError("n_grid must be >= 64 for the scalar potential");
  const std::size_t n = n_grid;
  const double rho1 = geom.rho1;
  const double rho2 = geom.rho2;
  const double dr = geom.width() / static_cast<double>(n);

  auto sample = [&](double r) {
    const double b = field(r);
    if (!std::isfinite(b) || b <= 0.0) {
      std::ostringstream msg;
      msg << "magnetic field must be strictly positive; B(" << r << ") = " << b;
      throw DomainError(msg.str());
    }
    return b;
  };

  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = rho1 + dr * static_cast<double>(i);
  grid[n] = rho2;

  std::vector<double> b(n + 1);
  for (std::size_t i = 0; i <= n; ++i) b[i] = sample(grid[i]);

  // flux[i] = int_{rho1}^{r_i} s B(s) ds, inner[i] = int_{rho1}^{r_i} flux(s)/s ds.
  // Both by Simpson on each cell, with the half-cell Simpson supplying flux at midpoints.
  std::vector<double> flux(n + 1, 0.0);
  std::vector<double> inner(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r0 = grid[i];
    const double r1 = grid[i + 1];
    const double mid = 0.5 * (r0 + r1);
    const double quarter = r0 + 0.25 * (r1 - r0);
    const double g0 = r0 * b[i];
    const double g1 = r1 * b[i + 1];
    const double gm = mid * sample(mid);
    const double gq = quarter * sample(quarter);
    const double h = r1 - r0;
    const double flux_mid = flux[i] + (0.5 * h) / 6.0 * (g0 + 4.0 * gq + gm);
    flux[i + 1] = flux[i] + h / 6.0 * (g0 + 4.0 * gm + g1);
    inner[i + 1] = inner[i] + h / 6.0 * (flux[i] / r0 + 4.0 * flux_mid / mid + flux[i + 1] / r1);
  }

  const double log_ratio = std::log(rho2 / rho1);
  const double c = -inner[n] / log_ratio;

  std::vector<double> phi(n + 1);
  std::vector<double> dphi(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    phi[i] = inner[i] + c * std::log(grid[i] / rho1);
    dphi[i] = (flux[i] + c) / grid[i];
  }
  phi[0] = 0.0;
  phi[n] = 0.0;

  ScalarPotential pot(geom, std::move(grid), std::move(phi), std::move(dphi), std::move(b));
  const auto& r = pot.grid_;
  const auto& d = pot.dphi_;

  // phi' < 0 near rho1 and > 0 near rho2; it must change sign exactly once.
  std::size_t changes = 0;
  std::size_t cell = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool neg0 = d[i] < 0.0;
    const bool neg1 = d[i + 1] < 0.0;
    if (neg0 != neg1) {
      ++changes;
      cell = i;
    }
  }
  if (changes != 1 || !(d[0] < 0.0)) {
    throw InternalError("phi' must change sign exactly once on (rho1, rho2); found " + std::to_string(changes));
  }

  double r_min;
  if (d[cell + 1] == 0.0) {
    r_min = r[cell + 1];
  } else {
    const double tol = 1e-12 * geom.width();
    std::uintmax_t max_iter = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(
        [&](double x) { return pot.dphi_at(x); }, r[cell], r[cell + 1], d[cell], d[cell + 1],
        [tol](double a, double bnd) { return std::abs(bnd - a) <= tol; }, max_iter);
    r_min = 0.5 * (lo + hi);
  }

  PotentialFeatures& f = pot.features_;
  f.r_min = r_min;
  f.phi_min = pot.phi_at(r_min);
  f.curvature = sample(r_min);
  f.dn_phi_inner = -d.front();
  f.dn_phi_outer = d.back();
  f.b0 = std::min(*std::min_element(pot.field_.begin(), pot.field_.end()), f.curvature);

  {
    const std::size_t nearest = static_cast<std::size_t>(std::lround((r_min - rho1) / dr));
    const std::size_t first = std::clamp<std::size_t>(nearest >= 2 ? nearest - 2 : 0, 0, n - 5);
    f.curvature_from_phi = lagrange_derivative(std::span<const double>(r).subspan(first, 6),
                                               std::span<const double>(d).subspan(first, 6), r_min);
  }

  for (std::size_t i = 0; i <= n; ++i) {
    if (pot.phi_[i] > 0.0) throw InternalError("phi must be non-positive at every node");
  }
  if (!(f.phi_min < 0.0)) throw InternalError("phi_min must be negative");
  if (!(f.dn_phi_inner > 0.0 && f.dn_phi_outer > 0.0)) {
    throw InternalError("normal derivatives of phi must be positive on both circles");
  }
  if (!(r_min > rho1 && r_min < rho2)) throw InternalError("r_min must be interior");
  return pot;
}

void write_potential_csv(std::ostream& out, const ScalarPotential& pot) {
  csv::row(out, {"r", "phi", "dphi"});
  const auto r = pot.grid();
  const auto phi = pot.phi();
  const auto dphi = pot.dphi();
  for (std::size_t i = 0; i < r.size(); ++i) {
    csv::row(out, {csv::number(r[i]), csv::number(phi[i]), csv::number(dphi[i])});
  }
}

}  // namespace pauli_annulus
