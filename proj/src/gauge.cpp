#include "pauli_annulus/gauge.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pauli_annulus/errors.hpp"

namespace pauli_annulus {

double theta_gradient_magnitude(const AnnulusGeometry& geom, double r) {
  if (!(r >= geom.rho1 && r <= geom.rho2)) {
    std::ostringstream msg;
    msg << "radius " << r << " outside [" << geom.rho1 << ", " << geom.rho2 << "]";
    throw DomainError(msg.str());
  }
  return 1.0 / (r * std::abs(std::log(geom.rho1 / geom.rho2)));
}

double theta_inner_circulation(const AnnulusGeometry& geom) {
  return 2.0 * std::numbers::pi / std::log(geom.rho1 / geom.rho2);
}

double compute_c0(const ScalarPotential& pot, double circ_int_A) {
  if (!std::isfinite(circ_int_A)) throw DomainError("circulation must be finite");
  const double rho1 = pot.geometry().rho1;
  return rho1 * pot.dphi().front() - circ_int_A / (2.0 * std::numbers::pi);
}

double potential_gauge_circulation(const ScalarPotential& pot) {
  return 2.0 * std::numbers::pi * pot.geometry().rho1 * pot.dphi().front();
}

GaugeData make_gauge(const ScalarPotential& pot, double circ_int_A, std::int64_t p) {
  return GaugeData{circ_int_A, compute_c0(pot, circ_int_A), p};
}

FluxAtScale flux_at_scale(const GaugeData& g, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    std::ostringstream msg;
    msg << "semiclassical parameter h must be positive (got " << h << ")";
    throw DomainError(msg.str());
  }
  const double ratio = g.c0 / h;
  double fl = std::floor(ratio);
  double frac = ratio - fl;
  // ratio slightly below an integer can round frac up to exactly 1.
  if (frac >= 1.0) {
    fl += 1.0;
    frac = 0.0;
  }
  FluxAtScale out;
  out.h = h;
  out.gamma_hp = static_cast<double>(g.p) + ratio;
  out.gamma_frac = frac;
  out.floor_c0_over_h = static_cast<std::int64_t>(fl);
  return out;
}

double real_momentum(std::int64_t m, const GaugeData& g, double h) {
  return static_cast<double>(m - g.p) - g.c0 / h;
}

}  // namespace pauli_annulus
