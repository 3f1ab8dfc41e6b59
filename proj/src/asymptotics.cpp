#include "pauli_annulus/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pauli_annulus/errors.hpp"

namespace pauli_annulus {

namespace {

// Knuth's error-free transformation: a + b = s + err exactly.
std::pair<double, double> two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

}  // namespace

std::pair<double, double> LogScaled::log_value() const { return two_sum(log_scale, std::log(mantissa)); }

double LogScaled::value() const { return std::exp(log_scale) * mantissa; }

int compare(const LogScaled& a, const LogScaled& b) {
  const auto [ahi, alo] = a.log_value();
  const auto [bhi, blo] = b.log_value();
  const auto [dhi, dlo] = two_sum(ahi, -bhi);
  const double diff = dhi + (dlo + (alo - blo));
  if (diff < 0.0) return -1;
  if (diff > 0.0) return 1;
  return 0;
}

PrefactorLaw PrefactorLaw::from_potential(const ScalarPotential& pot) {
  const auto& f = pot.features();
  const auto& g = pot.geometry();
  PrefactorLaw law;
  law.curvature = f.curvature;
  law.curvature_from_phi = f.curvature_from_phi;
  law.r_min = f.r_min;
  law.dn_inner = f.dn_phi_inner;
  law.dn_outer = f.dn_phi_outer;
  law.q_inner = g.rho1 / f.r_min;
  law.q_outer = g.rho2 / f.r_min;
  return law;
}

PrefactorLaw PrefactorLaw::from_parameters(double curvature, double dn_inner, double dn_outer, double q_inner,
                                           double q_outer) {
  if (!(curvature > 0.0 && dn_inner > 0.0 && dn_outer > 0.0 && q_inner > 0.0 && q_inner < 1.0 && q_outer > 1.0)) {
    throw DomainError("prefactor law needs curvature, dn > 0 and 0 < q_inner < 1 < q_outer");
  }
  PrefactorLaw law;
  law.curvature = curvature;
  law.curvature_from_phi = curvature;
  law.r_min = 1.0;
  law.dn_inner = dn_inner;
  law.dn_outer = dn_outer;
  law.q_inner = q_inner;
  law.q_outer = q_outer;
  return law;
}

double PrefactorLaw::lower_bound() const {
  return 2.0 * std::sqrt(curvature / std::numbers::pi) * std::min(dn_inner, dn_outer);
}

double f_eval(const PrefactorLaw& law, double x) {
  if (!(std::abs(x) <= 500.0)) return std::numeric_limits<double>::infinity();
  const double power = 2.0 * x + 1.0;
  const double inner = law.dn_inner * std::exp(power * std::log(law.q_inner));
  const double outer = law.dn_outer * std::exp(power * std::log(law.q_outer));
  return 2.0 * std::sqrt(law.curvature / std::numbers::pi) * (inner + outer);
}

double f_minimizer(const PrefactorLaw& law) {
  const double li = std::log(law.q_inner);
  const double lo = std::log(law.q_outer);
  const double ratio = law.dn_inner * (-li) / (law.dn_outer * lo);
  return 0.5 * (std::log(ratio) / (lo - li) - 1.0);
}

double stationarity_residual(const PrefactorLaw& law, double x) {
  const double power = 2.0 * x + 1.0;
  return law.dn_inner * std::log(1.0 / law.q_inner) * std::pow(law.q_inner, power) -
         law.dn_outer * std::log(law.q_outer) * std::pow(law.q_outer, power);
}

AlphaResult alpha_k(const PrefactorLaw& law, double gamma, std::size_t k) {
  if (k == 0) throw DomainError("alpha_k needs k >= 1");
  const double center = f_minimizer(law) + gamma;
  const auto mid = static_cast<std::int64_t>(std::llround(center));
  auto g = [&](std::int64_t m) { return f_eval(law, static_cast<double>(m) - gamma); };

  std::int64_t half = static_cast<std::int64_t>(k) + 1;
  for (int round = 0; round < 40; ++round, half *= 2) {
    const std::int64_t lo = mid - half;
    const std::int64_t hi = mid + half;
    std::vector<std::pair<double, std::int64_t>> entries;
    entries.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t m = lo; m <= hi; ++m) entries.emplace_back(g(m), m);
    if (entries.size() < k) continue;
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(k), entries.end());
    const double kth = entries[k - 1].first;
    // f(. - gamma) is convex, so everything outside [lo, hi] is at least
    // as large as the nearer neighbour of the window.
    if (g(lo - 1) > kth && g(hi + 1) > kth) {
      AlphaResult out;
      out.value = kth;
      for (std::size_t i = 0; i < k; ++i) {
        out.values.push_back(entries[i].first);
        out.realizing.push_back(entries[i].second);
      }
      return out;
    }
  }
  throw InternalError("alpha_k: window search did not terminate (f must be coercive)");
}

LogScaled predicted_lambda(const PrefactorLaw& law, const ScalarPotential& pot, double gamma_frac, std::size_t k,
                           double h) {
  if (!(h > 0.0)) throw DomainError("semiclassical parameter h must be positive");
  return LogScaled{2.0 * pot.features().phi_min / h + 0.5 * std::log(h), alpha_k(law, gamma_frac, k).value};
}

double upper_bound_constant(const PrefactorLaw& law, const AnnulusGeometry& geom, double m, double h, double alpha,
                            double beta) {
  if (!(alpha > 0.5 && alpha < 1.0) || !(beta > 1.0 / 3.0 && beta < 0.5)) {
    std::ostringstream msg;
    msg << "upper_bound_constant needs alpha in (1/2,1) and beta in (1/3,1/2); got " << alpha << ", " << beta;
    throw DomainError(msg.str());
  }
  const double power = 2.0 * m + 1.0;
  const double sgn = static_cast<double>((power > 0.0) - (power < 0.0));
  const double denom = law.r_min - sgn * std::pow(h, beta);
  if (!(denom > 0.0)) throw DomainError("upper_bound_constant: h^beta exceeds r_min");
  const double inner = (geom.rho1 + (m >= 0.0 ? std::pow(h, alpha) : 0.0)) / denom;
  const double outer = (geom.rho2 - (m < 0.0 ? std::pow(h, alpha) : 0.0)) / denom;
  return 2.0 * std::sqrt(law.curvature / std::numbers::pi) *
         (law.dn_inner * std::pow(inner, power) + law.dn_outer * std::pow(outer, power));
}

}  // namespace pauli_annulus
