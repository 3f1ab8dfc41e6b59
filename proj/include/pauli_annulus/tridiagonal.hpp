#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pauli_annulus {

/// Symmetric tridiagonal matrix: diag has n entries, offdiag n - 1.
struct TridiagonalSym {
  std::vector<double> diag;
  std::vector<double> offdiag;

  TridiagonalSym() = default;
  TridiagonalSym(std::vector<double> d, std::vector<double> e);

  std::size_t size() const { return diag.size(); }
  /// max |diag|, the natural scale for absolute error statements.
  double scale() const;
  /// Throws NumericalGuardError on a non-finite entry.
  void check_finite() const;
};

/// Number of eigenvalues strictly below x (Sturm sequence / LDL^T inertia).
std::size_t sturm_count(const TridiagonalSym& mat, double x);

/// The k algebraically smallest eigenvalues in ascending order, by Sturm
/// bisection to relative tolerance rel_tol (absolute floor 1e-300).
std::vector<double> smallest_eigenvalues(const TridiagonalSym& mat, std::size_t k, double rel_tol = 1e-12);

/// Zero-diagonal symmetric tridiagonal matrix with the given couplings.
///
/// Interleaving rows and columns of a bidiagonal B gives this form; its
/// eigenvalues are +/- the singular values of B (plus one zero when the
/// size is odd). Bisection on it resolves small singular values to high
/// relative accuracy, which an explicitly formed B^T B cannot.
struct GolubKahanMatrix {
  std::vector<double> couplings;

  std::size_t size() const { return couplings.size() + 1; }
};

/// The k smallest singular values encoded by gk, ascending.
std::vector<double> smallest_singular_values(const GolubKahanMatrix& gk, std::size_t k, double rel_tol = 1e-12);

/// Unit-norm eigenvector for an (already computed) eigenvalue, by inverse
/// iteration with a pivoted tridiagonal LU. Sign fixed so the largest
/// component is positive.
std::vector<double> eigenvector(const TridiagonalSym& mat, double eigenvalue);

}  // namespace pauli_annulus
