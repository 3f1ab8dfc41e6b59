#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace pauli_annulus {

/// Concentric annulus rho1 < |x| < rho2.
struct AnnulusGeometry {
  double rho1 = 1.0;
  double rho2 = 2.0;

  AnnulusGeometry() = default;
  AnnulusGeometry(double inner, double outer);

  double width() const { return rho2 - rho1; }
};

enum class FieldKind { constant, polynomial, table };

std::string to_string(FieldKind kind);

/// Radial magnetic field B(r) > 0 on [rho1, rho2].
///
/// Three input kinds are supported: a constant, a polynomial in r, or an
/// (r, B) table interpolated with a monotone cubic (PCHIP). Positivity is
/// checked on a dense grid at construction; B0 caches the minimum found
/// there and is refined by solve_scalar_potential.
class RadialField {
 public:
  static RadialField constant(const AnnulusGeometry& geom, double value);
  /// coefficients[k] multiplies r^k.
  static RadialField polynomial(const AnnulusGeometry& geom, std::vector<double> coefficients);
  static RadialField table(const AnnulusGeometry& geom, std::vector<double> r, std::vector<double> b);

  double operator()(double r) const { return profile_(r); }

  FieldKind kind() const { return kind_; }
  const AnnulusGeometry& geometry() const { return geom_; }
  double b0() const { return b0_; }
  const std::vector<double>& parameters() const { return params_; }
  const std::vector<double>& table_r() const { return table_r_; }

  /// Flux 2*pi*int_0^{rho1} s B(s) ds through the hole, for kinds whose
  /// closed form extends into the hole. Empty for tables.
  std::optional<double> hole_flux() const;

 private:
  RadialField(const AnnulusGeometry& geom, FieldKind kind, std::function<double(double)> profile);
  void validate_positive(std::size_t samples);

  AnnulusGeometry geom_;
  FieldKind kind_;
  std::function<double(double)> profile_;
  std::vector<double> params_;
  std::vector<double> table_r_;
  double b0_ = 0.0;
};

struct PotentialFeatures {
  double phi_min = 0.0;
  double r_min = 0.0;
  /// B(r_min); equals phi''(r_min) since phi'(r_min) = 0.
  double curvature = 0.0;
  /// phi''(r_min) obtained by differentiating the nodal phi' directly.
  double curvature_from_phi = 0.0;
  /// Exterior normal derivative at rho1 (normal points to the origin): -phi'(rho1).
  double dn_phi_inner = 0.0;
  /// Exterior normal derivative at rho2: +phi'(rho2).
  double dn_phi_outer = 0.0;
  /// min B over the grid nodes and r_min.
  double b0 = 0.0;
};

/// Dirichlet solution of phi'' + phi'/r = B on a uniform radial grid.
///
/// Immutable once built; share freely across threads.
class ScalarPotential {
 public:
  const AnnulusGeometry& geometry() const { return geom_; }
  std::span<const double> grid() const { return grid_; }
  std::span<const double> phi() const { return phi_; }
  std::span<const double> dphi() const { return dphi_; }
  std::span<const double> field_samples() const { return field_; }
  const PotentialFeatures& features() const { return features_; }

  std::size_t intervals() const { return grid_.size() - 1; }
  double spacing() const { return spacing_; }

  /// Cubic Hermite interpolant of phi (uses phi and phi' at the nodes).
  double phi_at(double r) const;
  /// Cubic Hermite interpolant of phi' (uses phi' and phi'' = B - phi'/r).
  double dphi_at(double r) const;

 private:
  friend ScalarPotential solve_scalar_potential(const AnnulusGeometry&, const RadialField&, std::size_t);

  ScalarPotential(AnnulusGeometry geom, std::vector<double> grid, std::vector<double> phi,
                  std::vector<double> dphi, std::vector<double> field_samples);

  std::size_t locate(double r) const;
  double ddphi_node(std::size_t i) const { return field_[i] - dphi_[i] / grid_[i]; }

  AnnulusGeometry geom_;
  std::vector<double> grid_;
  std::vector<double> phi_;
  std::vector<double> dphi_;
  std::vector<double> field_;
  double spacing_;
  PotentialFeatures features_;
};

/// Builds phi by Simpson quadrature of phi'(r) = (int_{rho1}^r s B(s) ds + C)/r,
/// C fixed so that phi(rho2) = 0. n_grid is the number of intervals (>= 64).
ScalarPotential solve_scalar_potential(const AnnulusGeometry& geom, const RadialField& field,
                                       std::size_t n_grid);

/// Free-function spelling of ScalarPotential::phi_at.
double phi_at(const ScalarPotential& pot, double r);

/// CSV dump with header `r,phi,dphi`.
void write_potential_csv(std::ostream& out, const ScalarPotential& pot);

}  // namespace pauli_annulus
