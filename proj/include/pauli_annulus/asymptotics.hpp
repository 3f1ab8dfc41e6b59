#pragma once

#include <cstdint>
#include <vector>

#include "pauli_annulus/radial_field.hpp"

namespace pauli_annulus {

/// A positive number stored as exp(log_scale) * mantissa so that
/// e^{2 phi_min/h} never has to be formed on its own.
struct LogScaled {
  double log_scale = 0.0;
  double mantissa = 0.0;

  /// log_scale + ln(mantissa) as an unevaluated sum (hi, lo).
  std::pair<double, double> log_value() const;
  /// exp(log_scale) * mantissa; may under- or overflow.
  double value() const;
};

/// Three-way comparison of log-scaled positives via compensated log sums.
int compare(const LogScaled& a, const LogScaled& b);

/// Parameters of the limiting prefactor
///   f(x) = 2 sqrt(curvature/pi) (dn_inner q_inner^{2x+1} + dn_outer q_outer^{2x+1}).
struct PrefactorLaw {
  double curvature = 0.0;
  double curvature_from_phi = 0.0;
  double r_min = 0.0;
  double dn_inner = 0.0;
  double dn_outer = 0.0;
  double q_inner = 0.0;
  double q_outer = 0.0;

  static PrefactorLaw from_potential(const ScalarPotential& pot);
  /// Law from raw parameters (used for synthetic instances).
  static PrefactorLaw from_parameters(double curvature, double dn_inner, double dn_outer, double q_inner,
                                      double q_outer);

  /// 2 sqrt(curvature/pi) min(dn_inner, dn_outer)
  double lower_bound() const;
};

/// f(x); +infinity beyond |x| > 500.
double f_eval(const PrefactorLaw& law, double x);

/// Unique minimizer of f on the real line (closed form of f'(x) = 0).
double f_minimizer(const PrefactorLaw& law);

/// dn_inner ln(1/q_inner) q_inner^{2x+1} - dn_outer ln(q_outer) q_outer^{2x+1}
double stationarity_residual(const PrefactorLaw& law, double x);

struct AlphaResult {
  double value = 0.0;
  /// The k integers m with the smallest f(m - gamma), ordered by value then m.
  std::vector<std::int64_t> realizing;
  /// Values f(m - gamma) for the integers in `realizing`.
  std::vector<double> values;
};

/// k-th smallest value of f(m - gamma) over m in Z, which is the min-max
/// over k-subsets of Z of the largest value.
AlphaResult alpha_k(const PrefactorLaw& law, double gamma, std::size_t k);

/// Leading-order prediction lambda_k(h) ~ alpha_k sqrt(h) e^{2 phi_min/h}.
LogScaled predicted_lambda(const PrefactorLaw& law, const ScalarPotential& pot, double gamma_frac, std::size_t k,
                           double h);

/// Constant of the trial-function upper bound at finite h:
///   2 sqrt(curvature/pi) [ dn_inner ((rho1 + h^a 1_{m>=0}) / (r_min - sgn(2m+1) h^b))^{2m+1}
///                        + dn_outer ((rho2 - h^a 1_{m<0}) / (r_min - sgn(2m+1) h^b))^{2m+1} ].
/// Requires alpha in (1/2, 1), beta in (1/3, 1/2).
double upper_bound_constant(const PrefactorLaw& law, const AnnulusGeometry& geom, double m, double h,
                            double alpha = 0.7, double beta = 5.0 / 12.0);

}  // namespace pauli_annulus
