#pragma once

#include <cstdint>

#include "pauli_annulus/radial_field.hpp"

namespace pauli_annulus {

/// Gauge class of the physical vector potential A.
///
/// On the annulus, A is determined up to gauge by B and its circulation
/// around the inner circle, so only that number is stored.
struct GaugeData {
  double circ_int_A = 0.0;
  /// rho1 * phi'(rho1) - circ_int_A / (2 pi)
  double c0 = 0.0;
  /// Conjugation index of the gauge A_{h,p}.
  std::int64_t p = 0;
};

/// Flux-dependent quantities at a fixed semiclassical parameter.
struct FluxAtScale {
  double h = 0.0;
  /// p + c0/h
  double gamma_hp = 0.0;
  /// c0/h - floor(c0/h), in [0, 1)
  double gamma_frac = 0.0;
  /// floor(c0/h)
  std::int64_t floor_c0_over_h = 0;
};

/// |grad^perp theta|(r) = 1 / (r |ln(rho1/rho2)|), theta the harmonic function
/// equal to 1 on the inner circle and 0 on the outer one.
double theta_gradient_magnitude(const AnnulusGeometry& geom, double r);

/// Signed circulation of grad^perp theta over the inner circle: 2 pi / ln(rho1/rho2).
double theta_inner_circulation(const AnnulusGeometry& geom);

double compute_c0(const ScalarPotential& pot, double circ_int_A);

/// Circulation of A = grad^perp phi over the inner circle (the gauge with c0 = 0).
double potential_gauge_circulation(const ScalarPotential& pot);

GaugeData make_gauge(const ScalarPotential& pot, double circ_int_A, std::int64_t p = 0);

FluxAtScale flux_at_scale(const GaugeData& g, double h);

/// m - gamma_{h,p}, evaluated as (m - p) - c0/h so that (m, p) and
/// (m + k, p + k) give bitwise identical results.
double real_momentum(std::int64_t m, const GaugeData& g, double h);

}  // namespace pauli_annulus
