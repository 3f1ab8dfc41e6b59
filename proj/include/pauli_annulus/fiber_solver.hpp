#pragma once

#include <string>
#include <vector>

#include "pauli_annulus/radial_field.hpp"
#include "pauli_annulus/tridiagonal.hpp"

namespace pauli_annulus {

enum class Formulation { direct, weighted };
/// Spin block of the Pauli operator: minus carries -hB, plus carries +hB.
enum class SpinBlock { minus, plus };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& name);

/// Switches that remove individual terms of the fiber operator. Only tests
/// turn these off (pure Laplacian, bare monomial kernel, ...).
struct AssemblyHooks {
  bool quarter_term = true;
  bool potential = true;
  bool field = true;
};

/// One angular-momentum fiber: the 1D operator
///   -h^2 (d_rr + 1/(4r^2)) + (h m~/r - phi')^2 -/+ h B
/// on (rho1, rho2) with Dirichlet conditions, m~ real.
class FiberProblem {
 public:
  static constexpr std::size_t kMinGrid = 128;
  /// 2|phi_min|/h beyond this overflows e^{2|phi_min|/h} in double precision.
  static constexpr double kMaxExponent = 700.0;

  FiberProblem(const ScalarPotential& pot, const RadialField& field, double h, double m_tilde,
               std::size_t n_grid, Formulation formulation = Formulation::weighted,
               SpinBlock spin = SpinBlock::minus, AssemblyHooks hooks = {});

  const ScalarPotential& potential() const { return *pot_; }
  const RadialField& field() const { return *field_; }
  double h() const { return h_; }
  double m_tilde() const { return m_tilde_; }
  std::size_t n_grid() const { return n_grid_; }
  Formulation formulation() const { return formulation_; }
  SpinBlock spin() const { return spin_; }
  const AssemblyHooks& hooks() const { return hooks_; }

  double spacing() const { return pot_->geometry().width() / static_cast<double>(n_grid_); }
  double radius(std::size_t i) const;
  /// phi_min with hooks applied (0 when the potential is switched off).
  double phi_min() const;
  double phi(double r) const;
  /// phi' at grid node i, reusing the nodal quadrature values when grids coincide.
  double dphi_node(std::size_t i) const;
  double field_at(double r) const;
  /// log(sqrt(h) e^{2 phi_min/h}) = 2 phi_min/h + ln(h)/2
  double log_scale() const;

 private:
  const ScalarPotential* pot_;
  const RadialField* field_;
  double h_;
  double m_tilde_;
  std::size_t n_grid_;
  Formulation formulation_;
  SpinBlock spin_;
  AssemblyHooks hooks_;
};

/// Central-difference discretization of the direct form on the interior nodes.
TridiagonalSym assemble_direct(const FiberProblem& prob);

/// Weighted Rayleigh-quotient form
///   h^2 int w |(d_r - (m~+1/2)/r) v|^2 / int w |v|^2,  w = e^{-2(phi - phi_min)/h},
/// discretized with first differences on edges and a lumped mass.
struct WeightedSystem {
  TridiagonalSym stiffness;
  std::vector<double> mass_diag;
  /// Mass-reduced factor B with M^{-1/2} K M^{-1/2} = B^T B, interleaved
  /// into Golub-Kahan form (row 0, col 0, row 1, col 1, ...).
  GolubKahanMatrix factor;
  /// Edge weights w(r_{i+1/2}) and the edge operator coefficients.
  std::vector<double> edge_weight;
  std::vector<double> edge_left;
  std::vector<double> edge_right;

  /// M^{-1/2} K M^{-1/2} as a standard symmetric tridiagonal.
  TridiagonalSym reduced() const;
};

WeightedSystem assemble_weighted(const FiberProblem& prob);

/// Smallest k eigenvalues of the fiber in the problem's formulation.
std::vector<double> fiber_eigenvalues(const FiberProblem& prob, std::size_t k, double rel_tol = 1e-12);

/// ||d^x u0|| / ||u0|| for u0 = e^{-(phi-phi_min)/h} r^{m~+1/2}, with the
/// first-order operator d^x = -ih(d_r - (m~+1/2)/r + phi'/h) applied by
/// central differences, in the trapezoid-weighted discrete L^2 norm.
double kernel_residual(const FiberProblem& prob);

/// Discrete Rayleigh quotient (weighted form) of v = chi(r) r^{m~+1/2},
/// chi the optimal boundary-layer cutoff of width eps at each circle.
double variational_upper_bound(const FiberProblem& prob, double eps);

struct UpperBoundScan {
  double best = 0.0;
  double best_eps = 0.0;
  std::vector<double> exponents;
  std::vector<double> bounds;
};

/// Scans eps = h^a for a in {0.55, 0.60, ..., 0.95} and keeps the minimum.
UpperBoundScan scan_upper_bound(const FiberProblem& prob);

/// Default boundary-layer width h^0.7.
double default_boundary_width(double h);

struct FiberSpectrum {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  /// log(sqrt(h) e^{2 phi_min/h})
  double log_scale = 0.0;
  /// lambda1 / (sqrt(h) e^{2 phi_min/h})
  double prefactor1 = 0.0;
  double prefactor2 = 0.0;
  double kernel_residual = 0.0;
  double upper_bound = 0.0;
  double upper_bound_prefactor = 0.0;
  std::size_t grid_used = 0;
  Formulation formulation = Formulation::weighted;
};

struct FiberSolveOptions {
  double rel_tol = 1e-12;
  bool diagnostics = true;
};

FiberSpectrum solve_fiber(const FiberProblem& prob, const FiberSolveOptions& options = {});

/// Debug dump with header `i,diag,offdiag` (offdiag empty on the last row).
void write_matrix_csv(std::ostream& out, const TridiagonalSym& mat);

}  // namespace pauli_annulus
