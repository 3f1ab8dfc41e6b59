#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pauli_annulus/errors.hpp"
#include "pauli_annulus/gauge.hpp"
#include "pauli_annulus/radial_field.hpp"

using namespace pauli_annulus;

namespace {

struct Geom0 {
  AnnulusGeometry geom{1.0, 2.0};
  RadialField field = RadialField::constant(geom, 1.0);
  ScalarPotential pot = solve_scalar_potential(geom, field, 4096);
};

}  // namespace

TEST_CASE("harmonic function theta") {
  const AnnulusGeometry geom(1.0, 2.0);
  CHECK(theta_gradient_magnitude(geom, 1.0) == doctest::Approx(1.0 / std::log(2.0)));
  CHECK(theta_gradient_magnitude(geom, 2.0) == doctest::Approx(0.5 / std::log(2.0)));
  CHECK(theta_inner_circulation(geom) == doctest::Approx(-2.0 * std::numbers::pi / std::log(2.0)));
  // |circulation| = 2 pi r |grad theta| on every circle.
  for (double r : {1.0, 1.3, 2.0}) {
    CHECK(2.0 * std::numbers::pi * r * theta_gradient_magnitude(geom, r) ==
          doctest::Approx(std::abs(theta_inner_circulation(geom))).epsilon(1e-14));
  }
  CHECK_THROWS_AS(theta_gradient_magnitude(geom, 0.5), DomainError);
}

TEST_CASE("potential gauge has c0 = 0") {
  const Geom0 g;
  const double circ = potential_gauge_circulation(g.pot);
  // phi'(1) = 1/2 - 3/(4 ln 2)
  CHECK(circ == doctest::Approx(2.0 * std::numbers::pi * (0.5 - 0.75 / std::log(2.0))).epsilon(1e-12));
  const auto gauge = make_gauge(g.pot, circ);
  CHECK(std::abs(gauge.c0) < 1e-15);
}

TEST_CASE("symmetric gauge for the unit field") {
  const Geom0 g;
  // A = (r/2) e_theta has inner circulation pi; c0 = phi'(1) - 1/2.
  const auto gauge = make_gauge(g.pot, *g.field.hole_flux());
  CHECK(gauge.c0 == doctest::Approx(-1.0820212806667227).epsilon(1e-12));
}

TEST_CASE("circulation shift by 2 pi h p moves c0 by -h p") {
  const Geom0 g;
  const double base = 0.731;
  const auto g0 = make_gauge(g.pot, base);
  for (double h : {0.2, 0.05}) {
    for (int p : {-3, 1, 2}) {
      const auto gp = make_gauge(g.pot, base + 2.0 * std::numbers::pi * h * p);
      CHECK(std::abs(gp.c0 - (g0.c0 - h * p)) <= 1e-12);
    }
  }
}

TEST_CASE("flux quantities at fixed h") {
  const GaugeData g{0.0, 0.37, 2};
  const auto f = flux_at_scale(g, 0.1);
  CHECK(f.floor_c0_over_h == 3);
  CHECK(f.gamma_frac == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(f.gamma_hp == doctest::Approx(5.7).epsilon(1e-12));
  const auto neg = flux_at_scale(GaugeData{0.0, -0.37, 0}, 0.1);
  CHECK(neg.floor_c0_over_h == -4);
  CHECK(neg.gamma_frac == doctest::Approx(0.3).epsilon(1e-12));
  const auto zero = flux_at_scale(GaugeData{}, 0.1);
  CHECK(zero.gamma_frac == 0.0);
  for (double c : {0.0, 0.123, -0.77}) {
    const double a = flux_at_scale(GaugeData{0.0, c, 0}, 0.05).gamma_frac;
    CHECK(a >= 0.0);
    CHECK(a < 1.0);
  }
  CHECK_THROWS_AS(flux_at_scale(g, 0.0), DomainError);
  CHECK_THROWS_AS(flux_at_scale(g, -1.0), DomainError);
}

TEST_CASE("real momentum is invariant under joint shifts of m and p") {
  for (double c0 : {0.0, 0.4123, -1.7}) {
    for (double h : {0.2, 0.0731}) {
      for (std::int64_t m = -5; m <= 5; ++m) {
        const double a = real_momentum(m, GaugeData{0.0, c0, 1}, h);
        const double b = real_momentum(m + 7, GaugeData{0.0, c0, 8}, h);
        CHECK(a == b);
        CHECK(a == doctest::Approx(static_cast<double>(m - 1) - c0 / h));
      }
    }
  }
}
