#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pauli_annulus/asymptotics.hpp"
#include "pauli_annulus/errors.hpp"
#include "pauli_annulus/radial_field.hpp"

using namespace pauli_annulus;

namespace {

// Unit field on (1, 2), all quantities from the closed-form potential.
PrefactorLaw geom0_law() {
  const long double ln2 = std::log(2.0L);
  const long double rmin = std::sqrt(3.0L / (2.0L * ln2));
  const long double dn_in = 0.75L / ln2 - 0.5L;
  const long double dn_out = 1.0L - 0.375L / ln2;
  return PrefactorLaw::from_parameters(1.0, static_cast<double>(dn_in), static_cast<double>(dn_out),
                                       static_cast<double>(1.0L / rmin), static_cast<double>(2.0L / rmin));
}

// Frozen from the long double evaluation of the same closed form.
constexpr double kF0 = 1.1505709890814688;
constexpr double kFm1 = 1.3470540565045002;
constexpr double kF1 = 1.5078124679714902;

double brute_force_alpha(const PrefactorLaw& law, double gamma, std::size_t k) {
  // Every k-subset of [-20, 20], keeping the smallest subset maximum.
  std::vector<double> vals;
  for (int m = -20; m <= 20; ++m) vals.push_back(f_eval(law, m - gamma));
  const std::size_t n = vals.size();
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t start, std::size_t depth, double mx) {
    if (mx >= best) return;
    if (depth == k) {
      best = mx;
      return;
    }
    for (std::size_t i = start; i < n; ++i) rec(i + 1, depth + 1, std::max(mx, vals[i]));
  };
  rec(0, 0, -std::numeric_limits<double>::infinity());
  return best;
}

}  // namespace

TEST_CASE("prefactor values for the unit field on (1, 2)") {
  const auto law = geom0_law();
  CHECK(f_eval(law, 0.0) == doctest::Approx(kF0).epsilon(1e-14));
  CHECK(f_eval(law, -1.0) == doctest::Approx(kFm1).epsilon(1e-14));
  CHECK(f_eval(law, 1.0) == doctest::Approx(kF1).epsilon(1e-14));
  CHECK(std::isinf(f_eval(law, 600.0)));
}

TEST_CASE("closed-form minimizer") {
  const auto law = geom0_law();
  const double x = f_minimizer(law);
  CHECK(std::abs(stationarity_residual(law, x)) < 1e-14);
  for (double dx : {-1e-3, 1e-3, 0.1, -0.5}) CHECK(f_eval(law, x + dx) > f_eval(law, x));
  CHECK(law.lower_bound() <= f_eval(law, x));
}

TEST_CASE("prefactor is convex") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int t = 0; t < 10; ++t) {
    const auto law = PrefactorLaw::from_parameters(u(rng), u(rng), u(rng), 0.5 * u(rng) / 3.0 + 0.1, 1.0 + u(rng));
    for (double x = -5.0; x <= 5.0; x += 0.25) {
      CHECK(f_eval(law, x - 1.0) + f_eval(law, x + 1.0) >= 2.0 * f_eval(law, x));
    }
  }
}

TEST_CASE("alpha_k matches the brute-force min-max") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const auto law = PrefactorLaw::from_parameters(0.2 + 2.0 * u(rng), 0.1 + u(rng), 0.1 + u(rng),
                                                   0.3 + 0.6 * u(rng), 1.1 + u(rng));
    const double gamma = u(rng);
    for (std::size_t k = 1; k <= 4; ++k) {
      const auto a = alpha_k(law, gamma, k);
      CHECK(a.value == brute_force_alpha(law, gamma, k));
      CHECK(a.values.size() == k);
      CHECK(std::is_sorted(a.values.begin(), a.values.end()));
    }
  }
}

TEST_CASE("alpha_k for the unit field") {
  const auto law = geom0_law();
  const auto a = alpha_k(law, 0.0, 3);
  CHECK(a.realizing == std::vector<std::int64_t>{0, -1, 1});
  CHECK(a.values[0] == doctest::Approx(kF0).epsilon(1e-14));
  CHECK(a.values[1] == doctest::Approx(kFm1).epsilon(1e-14));
  CHECK(a.values[2] == doctest::Approx(kF1).epsilon(1e-14));
  // Shifting gamma by one integer relabels m without changing values.
  const auto b = alpha_k(law, 1.0, 3);
  CHECK(b.values == a.values);
  CHECK(b.realizing == std::vector<std::int64_t>{1, 0, 2});
  CHECK_THROWS_AS(alpha_k(law, 0.0, 0), DomainError);
}

TEST_CASE("log-scaled comparison") {
  const LogScaled a{-300.0, 1.5};
  CHECK(compare(a, LogScaled{-300.0, 1.5}) == 0);
  CHECK(std::abs(compare(a, LogScaled{-300.0 + std::log(1.5), 1.0})) <= 1);
  CHECK(compare(LogScaled{-800.0, 2.0}, LogScaled{-800.0, 2.0000000000001}) < 0);
  CHECK(compare(LogScaled{-700.0, 1.0}, LogScaled{-800.0, 1e40}) > 0);
  CHECK(LogScaled{std::log(3.0), 2.0}.value() == doctest::Approx(6.0));
}

TEST_CASE("upper bound constant tends to f") {
  const AnnulusGeometry geom(1.0, 2.0);
  const auto field = RadialField::constant(geom, 1.0);
  const auto law = PrefactorLaw::from_potential(solve_scalar_potential(geom, field, 1024));
  for (double m : {-2.0, 0.0, 1.0}) {
    const double far = upper_bound_constant(law, geom, m, 1e-12);
    CHECK(far == doctest::Approx(f_eval(law, m)).epsilon(1e-3));
    CHECK(upper_bound_constant(law, geom, m, 0.05) > f_eval(law, m));
  }
  CHECK_THROWS_AS(upper_bound_constant(law, geom, 0.0, 0.05, 0.4), DomainError);
  CHECK_THROWS_AS(upper_bound_constant(law, geom, 0.0, 0.05, 0.7, 0.3), DomainError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(PrefactorLaw::from_parameters(0.0, 1.0, 1.0, 0.5, 2.0), DomainError);
  CHECK_THROWS_AS(PrefactorLaw::from_parameters(1.0, 1.0, 1.0, 1.5, 2.0), DomainError);
  CHECK_THROWS_AS(PrefactorLaw::from_parameters(1.0, 1.0, 1.0, 0.5, 0.9), DomainError);
}
