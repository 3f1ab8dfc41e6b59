#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pauli_annulus/errors.hpp"
#include "pauli_annulus/tridiagonal.hpp"

using namespace pauli_annulus;

namespace {

TridiagonalSym dirichlet_laplacian(std::size_t intervals) {
  const double d = 1.0 / static_cast<double>(intervals);
  return TridiagonalSym(std::vector<double>(intervals - 1, 2.0 / (d * d)),
                        std::vector<double>(intervals - 2, -1.0 / (d * d)));
}

Eigen::VectorXd dense_eigenvalues(const TridiagonalSym& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) a(i, i) = t.diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = a(i + 1, i) = t.offdiag[static_cast<std::size_t>(i)];
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("finite-difference Laplacian eigenvalues") {
  const std::size_t n = 1000;
  const auto lap = dirichlet_laplacian(n);
  const auto ev = smallest_eigenvalues(lap, 10);
  const double d = 1.0 / static_cast<double>(n);
  for (std::size_t j = 1; j <= 10; ++j) {
    const double s = std::sin(0.5 * static_cast<double>(j) * std::numbers::pi * d);
    const double exact = 4.0 * s * s / (d * d);
    CHECK(std::abs(ev[j - 1] - exact) / exact < 1e-10);
  }
}

TEST_CASE("random tridiagonals against a dense solver") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> d(50), e(49);
    for (auto& x : d) x = 4.0 * u(rng);
    for (auto& x : e) x = u(rng);
    const TridiagonalSym t(d, e);
    const auto ev = smallest_eigenvalues(t, 50);
    const auto ref = dense_eigenvalues(t);
    double worst = 0.0;
    for (std::size_t i = 0; i < 50; ++i) worst = std::max(worst, std::abs(ev[i] - ref(static_cast<Eigen::Index>(i))));
    CHECK(worst < 1e-10 * std::max(1.0, t.scale()));
    CHECK(std::is_sorted(ev.begin(), ev.end()));
  }
}

TEST_CASE("Sturm counts and preconditions") {
  const TridiagonalSym t({3.0, -1.0, 2.5, 0.25}, {0.0, 0.0, 0.0});
  CHECK(sturm_count(t, -2.0) == 0);
  CHECK(sturm_count(t, 0.0) == 1);
  CHECK(sturm_count(t, 1.0) == 2);
  CHECK(sturm_count(t, 10.0) == 4);
  const auto ev = smallest_eigenvalues(t, 4);
  CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ev[3] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(smallest_eigenvalues(t, 5), DomainError);
  CHECK_THROWS_AS(TridiagonalSym({1.0, 2.0}, {1.0, 2.0}), DomainError);
  const TridiagonalSym bad({1.0, std::nan("")}, {0.5});
  CHECK_THROWS_AS(bad.check_finite(), NumericalGuardError);
}

TEST_CASE("results are deterministic") {
  const auto lap = dirichlet_laplacian(300);
  const auto a = smallest_eigenvalues(lap, 5);
  const auto b = smallest_eigenvalues(lap, 5);
  CHECK(a == b);
}

TEST_CASE("Golub-Kahan singular values against a dense SVD") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (std::size_t n : {5u, 12u, 40u}) {
    // Lower bidiagonal B (n+1) x n: diagonal a_j, subdiagonal b_j.
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n));
    GolubKahanMatrix gk;
    for (std::size_t j = 0; j < n; ++j) {
      mat(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = a[j];
      mat(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(j)) = b[j];
      gk.couplings.push_back(a[j]);
      gk.couplings.push_back(b[j]);
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(mat).singularValues();
    const auto ours = smallest_singular_values(gk, 3);
    for (std::size_t k = 0; k < 3; ++k) {
      const double ref = sv(static_cast<Eigen::Index>(n - 1 - k));
      CHECK(std::abs(ours[k] - ref) / ref < 1e-11);
    }
  }
}

TEST_CASE("tiny singular values keep their relative accuracy") {
  // B = [[1, 0], [-1, 1], [0, -1]] scaled so sigma_min ~ 1e-150 would underflow
  // when squared; the couplings alone must still resolve it.
  GolubKahanMatrix gk{{1e-150, 1e-150, 1e-150, 1e-150}};
  const auto s = smallest_singular_values(gk, 2);
  CHECK(s[0] == doctest::Approx(1e-150).epsilon(1e-11));
  CHECK(s[1] == doctest::Approx(std::sqrt(3.0) * 1e-150).epsilon(1e-11));
}

TEST_CASE("inverse iteration eigenvector") {
  const auto lap = dirichlet_laplacian(200);
  const auto ev = smallest_eigenvalues(lap, 2);
  const auto v = eigenvector(lap, ev[1]);
  double norm = 0.0;
  for (double x : v) norm += x * x;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double av = lap.diag[i] * v[i];
    if (i > 0) av += lap.offdiag[i - 1] * v[i - 1];
    if (i + 1 < v.size()) av += lap.offdiag[i] * v[i + 1];
    worst = std::max(worst, std::abs(av - ev[1] * v[i]));
  }
  CHECK(worst < 1e-8 * lap.scale());
  CHECK(*std::max_element(v.begin(), v.end()) >= -*std::min_element(v.begin(), v.end()));
}
