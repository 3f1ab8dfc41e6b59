#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "pauli_annulus/errors.hpp"
#include "pauli_annulus/fiber_solver.hpp"

using namespace pauli_annulus;

namespace {

struct Geom0 {
  AnnulusGeometry geom{1.0, 2.0};
  RadialField field = RadialField::constant(geom, 1.0);
  ScalarPotential pot = solve_scalar_potential(geom, field, 4096);
};

const Geom0& geom0() {
  static const Geom0 g;
  return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Regression anchors (n = 4096, weighted form).
constexpr double kLambda1H01 = 0.028806306252515054;
constexpr double kLambda2H01 = 0.36316250870608663;

}  // namespace

TEST_CASE("pure Dirichlet Laplacian through the test hooks") {
  const auto& g = geom0();
  const AssemblyHooks bare{false, false, false};
  const FiberProblem prob(g.pot, g.field, 1.0, 0.0, 4096, Formulation::direct, SpinBlock::minus, bare);
  const auto ev = fiber_eigenvalues(prob, 2);
  CHECK(rel(ev[0], std::numbers::pi * std::numbers::pi) < 1e-5);
  CHECK(rel(ev[1], 4.0 * std::numbers::pi * std::numbers::pi) < 1e-5);
}

TEST_CASE("direct and weighted forms agree") {
  const auto& g = geom0();
  for (double m : {-1.0, 0.0, 2.0}) {
    const FiberProblem d(g.pot, g.field, 0.1, m, 4096, Formulation::direct);
    const FiberProblem w(g.pot, g.field, 0.1, m, 4096, Formulation::weighted);
    const double ld = fiber_eigenvalues(d, 1)[0];
    const double lw = fiber_eigenvalues(w, 1)[0];
    CHECK(rel(ld, lw) < 1e-6);
  }
}

TEST_CASE("fiber eigenvalue regression anchors") {
  const auto& g = geom0();
  const FiberProblem prob(g.pot, g.field, 0.1, 0.0, 4096);
  const auto s = solve_fiber(prob);
  CHECK(rel(s.lambda1, kLambda1H01) < 1e-9);
  CHECK(rel(s.lambda2, kLambda2H01) < 1e-9);
  CHECK(s.log_scale == doctest::Approx(2.0 * g.pot.features().phi_min / 0.1 + 0.5 * std::log(0.1)));
  CHECK(rel(s.prefactor1, s.lambda1 / std::exp(s.log_scale)) < 1e-14);
  CHECK(s.grid_used == 4096);
}

TEST_CASE("matrices depend on (m, p) only through m - p") {
  const auto& g = geom0();
  const double a = static_cast<double>(3 - 1) - 0.3 / 0.1;
  const double b = static_cast<double>(4 - 2) - 0.3 / 0.1;
  const FiberProblem pa(g.pot, g.field, 0.1, a, 1024, Formulation::direct);
  const FiberProblem pb(g.pot, g.field, 0.1, b, 1024, Formulation::direct);
  const auto ma = assemble_direct(pa);
  const auto mb = assemble_direct(pb);
  CHECK(ma.diag == mb.diag);
  CHECK(ma.offdiag == mb.offdiag);
}

TEST_CASE("weighted system structure") {
  const auto& g = geom0();
  const FiberProblem prob(g.pot, g.field, 0.1, 0.0, 1024);
  const auto sys = assemble_weighted(prob);
  const double dr = prob.spacing();
  double wmax = 0.0;
  std::size_t imax = 0;
  for (std::size_t i = 0; i < sys.mass_diag.size(); ++i) {
    const double w = sys.mass_diag[i] / dr;
    CHECK(w <= 1.0);
    if (w > wmax) {
      wmax = w;
      imax = i;
    }
  }
  for (double w : sys.edge_weight) CHECK(w <= 1.0);
  CHECK(std::abs(prob.radius(imax + 1) - g.pot.features().r_min) <= dr);
  CHECK(wmax > 0.9999);

  // The reduced matrix is M^{-1/2} K M^{-1/2}.
  const auto red = sys.reduced();
  for (std::size_t i = 0; i < red.size(); i += 37) {
    CHECK(rel(red.diag[i], sys.stiffness.diag[i] / sys.mass_diag[i]) < 1e-12);
    if (i + 1 < red.size()) {
      const double expected = sys.stiffness.offdiag[i] / std::sqrt(sys.mass_diag[i] * sys.mass_diag[i + 1]);
      CHECK(rel(red.offdiag[i], expected) < 1e-12);
    }
  }
}

TEST_CASE("weighted eigenvalue converges at second order") {
  const auto& g = geom0();
  auto lambda = [&](std::size_t n) { return fiber_eigenvalues(FiberProblem(g.pot, g.field, 0.2, 0.0, n), 1)[0]; };
  const double l1 = lambda(512);
  const double l2 = lambda(1024);
  const double l3 = lambda(2048);
  CHECK(std::abs(l1 - l2) / std::abs(l2 - l3) >= 3.5);
}

TEST_CASE("kernel residual of the monomial decreases with the grid") {
  const auto& g = geom0();
  for (double m : {-2.0, 0.0, 2.0}) {
    const double r1 = kernel_residual(FiberProblem(g.pot, g.field, 0.2, m, 1024));
    const double r2 = kernel_residual(FiberProblem(g.pot, g.field, 0.2, m, 2048));
    const double r3 = kernel_residual(FiberProblem(g.pot, g.field, 0.2, m, 4096));
    CHECK(r1 / r2 >= 3.5);
    CHECK(r2 / r3 >= 3.5);
  }
}

TEST_CASE("trial function bound dominates the first eigenvalue") {
  const auto& g = geom0();
  for (double h : {0.2, 0.1}) {
    for (double m : {-2.0, -0.3, 0.0, 1.0, 2.0}) {
      const FiberProblem prob(g.pot, g.field, h, m, 2048);
      const double l1 = fiber_eigenvalues(prob, 1)[0];
      CHECK(variational_upper_bound(prob, default_boundary_width(h)) >= l1);
      const auto scan = scan_upper_bound(prob);
      CHECK(scan.best >= l1);
      CHECK(scan.exponents.size() == scan.bounds.size());
    }
  }
  const FiberProblem prob(g.pot, g.field, 0.1, 0.0, 1024);
  CHECK_THROWS_AS(variational_upper_bound(prob, 0.0), DomainError);
  CHECK_THROWS_AS(variational_upper_bound(prob, 0.6), DomainError);
}

TEST_CASE("spectral gap of both spin blocks") {
  const auto& g = geom0();
  for (double h : {0.2, 0.1}) {
    for (double m : {-3.0, 0.0, 3.0}) {
      const FiberProblem minus(g.pot, g.field, h, m, 2048);
      CHECK(fiber_eigenvalues(minus, 2)[1] >= 2.0 * h * 0.99);
      const FiberProblem plus(g.pot, g.field, h, m, 2048, Formulation::direct, SpinBlock::plus);
      CHECK(fiber_eigenvalues(plus, 1)[0] >= 2.0 * h * 0.99);
    }
  }
}

TEST_CASE("fiber guards") {
  const auto& g = geom0();
  CHECK_THROWS_AS(FiberProblem(g.pot, g.field, 0.0, 0.0, 1024), DomainError);
  CHECK_THROWS_AS(FiberProblem(g.pot, g.field, 0.1, 0.0, 64), DomainError);
  CHECK_THROWS_AS(FiberProblem(g.pot, g.field, 1e-4, 0.0, 1024), NumericalGuardError);
  CHECK_THROWS_AS(FiberProblem(g.pot, g.field, 0.1, 0.0, 1024, Formulation::weighted, SpinBlock::plus), DomainError);
  CHECK_THROWS_AS(FiberProblem(g.pot, g.field, 0.1, 0.0, 1024, Formulation::weighted, SpinBlock::minus,
                               AssemblyHooks{false, true, true}),
                  DomainError);
  const FiberProblem coarse(g.pot, g.field, 0.002, 0.0, 128);
  CHECK_THROWS_AS(assemble_weighted(coarse), ResolutionError);
  CHECK(formulation_from_string("direct") == Formulation::direct);
  CHECK_THROWS_AS(formulation_from_string("dense"), DomainError);
}

TEST_CASE("matrix dump") {
  const auto& g = geom0();
  const FiberProblem prob(g.pot, g.field, 0.2, 0.0, 128, Formulation::direct);
  std::ostringstream out;
  write_matrix_csv(out, assemble_direct(prob));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "i,diag,offdiag\r");
  std::size_t rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 127);
  CHECK(last.back() == '\r');
  CHECK(last[last.size() - 2] == ',');
}
