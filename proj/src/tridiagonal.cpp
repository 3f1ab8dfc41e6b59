#include "pauli_annulus/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pauli_annulus/errors.hpp"

namespace pauli_annulus {

namespace {

constexpr double kAbsFloor = 1e-300;
constexpr double kSafeMin = std::numeric_limits<double>::min();

double pivot_floor(std::span<const double> offdiag) {
  double emax = 1.0;
  for (double e : offdiag) emax = std::max(emax, e * e);
  return kSafeMin * emax;
}

/// Bisection on [lo, hi] for the smallest x with count(x) >= target.
template <class Count>
double bisect(Count&& count, std::size_t target, double lo, double hi, double rel_tol) {
  for (int iter = 0; iter < 4000; ++iter) {
    const double width = hi - lo;
    const double mag = std::max(std::abs(lo), std::abs(hi));
    if (width <= std::max(rel_tol * mag, kAbsFloor)) break;
    const double mid = lo + 0.5 * width;
    if (mid <= lo || mid >= hi) break;
    if (count(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

}  // namespace

TridiagonalSym::TridiagonalSym(std::vector<double> d, std::vector<double> e)
    : diag(std::move(d)), offdiag(std::move(e)) {
  if (!diag.empty() && offdiag.size() + 1 != diag.size()) {
    throw DomainError("tridiagonal: offdiag must have size(diag) - 1 entries");
  }
}

double TridiagonalSym::scale() const {
  double s = 0.0;
  for (double d : diag) s = std::max(s, std::abs(d));
  return s;
}

void TridiagonalSym::check_finite() const {
  for (std::size_t i = 0; i < diag.size(); ++i) {
    if (!std::isfinite(diag[i])) throw NumericalGuardError("non-finite diagonal entry at row " + std::to_string(i));
  }
  for (std::size_t i = 0; i < offdiag.size(); ++i) {
    if (!std::isfinite(offdiag[i])) {
      throw NumericalGuardError("non-finite off-diagonal entry at row " + std::to_string(i));
    }
  }
}

std::size_t sturm_count(const TridiagonalSym& mat, double x) {
  const auto n = mat.size();
  if (n == 0) return 0;
  const double pivmin = pivot_floor(mat.offdiag);
  std::size_t negatives = 0;
  double q = mat.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++negatives;
  for (std::size_t i = 1; i < n; ++i) {
    const double e = mat.offdiag[i - 1];
    q = mat.diag[i] - x - e * e / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++negatives;
  }
  return negatives;
}

std::vector<double> smallest_eigenvalues(const TridiagonalSym& mat, std::size_t k, double rel_tol) {
  const auto n = mat.size();
  if (k > n) {
    throw DomainError("requested " + std::to_string(k) + " eigenvalues of a " + std::to_string(n) + "x" +
                      std::to_string(n) + " matrix");
  }
  if (k == 0) return {};
  mat.check_finite();

  // Gershgorin interval, widened slightly so the endpoints are strict bounds.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(mat.offdiag[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(mat.offdiag[i]) : 0.0;
    lo = std::min(lo, mat.diag[i] - left - right);
    hi = std::max(hi, mat.diag[i] + left + right);
  }
  const double pad = 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)) +
                     pivot_floor(mat.offdiag);
  lo -= pad;
  hi += pad;

  std::vector<double> out(k);
  double floor_lo = lo;
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = bisect([&](double x) { return sturm_count(mat, x); }, j + 1, floor_lo, hi, rel_tol);
    // Eigenvalue j+1 is >= eigenvalue j; the previous result's lower bracket stays valid.
    floor_lo = std::max(floor_lo, out[j] - std::max(rel_tol * std::abs(out[j]), kAbsFloor));
  }
  return out;
}

std::vector<double> smallest_singular_values(const GolubKahanMatrix& gk, std::size_t k, double rel_tol) {
  const auto& e = gk.couplings;
  const std::size_t n = gk.size();
  const std::size_t pairs = n / 2;
  if (k > pairs) {
    throw DomainError("requested " + std::to_string(k) + " singular values, only " + std::to_string(pairs) +
                      " available");
  }
  if (k == 0) return {};
  for (double c : e) {
    if (!std::isfinite(c)) throw NumericalGuardError("non-finite coupling in bidiagonal factor");
  }
  const double pivmin = pivot_floor(e);

  auto count = [&](double x) {
    std::size_t negatives = 0;
    double q = -x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++negatives;
    for (std::size_t i = 1; i < n; ++i) {
      q = -x - e[i - 1] * e[i - 1] / q;
      if (std::abs(q) < pivmin) q = -pivmin;
      if (q < 0.0) ++negatives;
    }
    return negatives;
  };

  double hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? std::abs(e[i - 1]) : 0.0;
    const double right = i + 1 < n ? std::abs(e[i]) : 0.0;
    hi = std::max(hi, left + right);
  }
  hi *= 1.0 + 4.0 * std::numeric_limits<double>::epsilon();

  // Eigenvalues below any x > 0: every -sigma, the zero (odd n), then sigma < x.
  const std::size_t base = n - pairs;
  std::vector<double> out(k);
  double lo = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    // Shrink the upper end geometrically first: small singular values sit
    // many binary orders below the Gershgorin bound.
    double top = hi;
    while (top > kAbsFloor && count(0.5 * top) >= base + j + 1 && 0.5 * top > lo) top *= 0.5;
    const double bottom = std::max(lo, 0.5 * top);
    out[j] = bisect(count, base + j + 1, count(bottom) >= base + j + 1 ? lo : bottom, top, rel_tol);
    lo = std::max(0.0, out[j] * (1.0 - rel_tol));
  }
  return out;
}

std::vector<double> eigenvector(const TridiagonalSym& mat, double eigenvalue) {
  const auto n = mat.size();
  if (n == 0) return {};
  if (n == 1) return {1.0};

  // Perturb the shift by a relative ulp-scale amount so the LU is not exactly singular.
  const double shift = eigenvalue + 4.0 * std::numeric_limits<double>::epsilon() *
                                        std::max(mat.scale(), std::abs(eigenvalue));

  // Pivoted LU of (A - shift I), LAPACK dgttrf layout.
  std::vector<double> dl(mat.offdiag);
  std::vector<double> d(n);
  std::vector<double> du(mat.offdiag);
  std::vector<double> du2(n > 2 ? n - 2 : 0, 0.0);
  std::vector<char> swapped(n - 1, 0);
  for (std::size_t i = 0; i < n; ++i) d[i] = mat.diag[i] - shift;
  const double tiny = std::max(kSafeMin, std::numeric_limits<double>::epsilon() * mat.scale() * 1e-3);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (std::abs(d[i]) < tiny) d[i] = tiny;
      const double fact = dl[i] / d[i];
      dl[i] = fact;
      d[i + 1] -= fact * du[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      dl[i] = fact;
      const double temp = du[i];
      du[i] = d[i + 1];
      d[i + 1] = temp - fact * d[i + 1];
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du[i + 1];
      }
      swapped[i] = 1;
    }
  }
  if (std::abs(d[n - 1]) < tiny) d[n - 1] = tiny;

  auto solve = [&](std::vector<double>& b) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= dl[i] * b[i];
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t ii = n - 2; ii-- > 0;) {
      b[ii] = (b[ii] - du[ii] * b[ii + 1] - du2[ii] * b[ii + 2]) / d[ii];
    }
  };

  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int iter = 0; iter < 4; ++iter) {
    solve(v);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalGuardError("inverse iteration failed");
    for (double& x : v) x /= norm;
  }
  const auto big = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (*big < 0.0) {
    for (double& x : v) x = -x;
  }
  return v;
}

}  // namespace pauli_annulus
