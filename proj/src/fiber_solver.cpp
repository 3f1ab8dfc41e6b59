#include "pauli_annulus/fiber_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "pauli_annulus/csv.hpp"
#include "pauli_annulus/errors.hpp"

namespace pauli_annulus {

std::string to_string(Formulation f) { return f == Formulation::direct ? "direct" : "weighted"; }

Formulation formulation_from_string(const std::string& name) {
  if (name == "direct") return Formulation::direct;
  if (name == "weighted") return Formulation::weighted;
  throw DomainError("unknown formulation '" + name + "' (expected direct or weighted)");
}

FiberProblem::FiberProblem(const ScalarPotential& pot, const RadialField& field, double h, double m_tilde,
                           std::size_t n_grid, Formulation formulation, SpinBlock spin, AssemblyHooks hooks)
    : pot_(&pot),
      field_(&field),
      h_(h),
      m_tilde_(m_tilde),
      n_grid_(n_grid),
      formulation_(formulation),
      spin_(spin),
      hooks_(hooks) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    std::ostringstream msg;
    msg << "semiclassical parameter h must be positive (got " << h << ")";
    throw DomainError(msg.str());
  }
  if (!std::isfinite(m_tilde)) throw DomainError("angular momentum must be finite");
  if (n_grid < kMinGrid) {
    throw DomainError("fiber n_grid must be >= " + std::to_string(kMinGrid) + " (got " + std::to_string(n_grid) + ")");
  }
  const double exponent = 2.0 * std::abs(phi_min()) / h;
  if (exponent > kMaxExponent) {
    std::ostringstream msg;
    msg << "2|phi_min|/h = " << exponent << " exceeds " << kMaxExponent
        << "; e^{2 phi_min/h} is not representable in double precision (increase h)";
    throw NumericalGuardError(msg.str());
  }
  if (formulation == Formulation::weighted) {
    if (spin == SpinBlock::plus) throw DomainError("the weighted formulation only represents the minus spin block");
    if (!hooks.quarter_term || hooks.potential != hooks.field) {
      throw DomainError("the weighted formulation cannot drop individual terms of the operator");
    }
  }
}

double FiberProblem::radius(std::size_t i) const {
  const auto& g = pot_->geometry();
  if (i >= n_grid_) return g.rho2;
  return g.rho1 + spacing() * static_cast<double>(i);
}

double FiberProblem::phi_min() const { return hooks_.potential ? pot_->features().phi_min : 0.0; }

double FiberProblem::phi(double r) const { return hooks_.potential ? pot_->phi_at(r) : 0.0; }

double FiberProblem::dphi_node(std::size_t i) const {
  if (!hooks_.potential) return 0.0;
  const std::size_t pot_n = pot_->intervals();
  if (pot_n % n_grid_ == 0) return pot_->dphi()[i * (pot_n / n_grid_)];
  return pot_->dphi_at(radius(i));
}

double FiberProblem::field_at(double r) const { return hooks_.field ? (*field_)(r) : 0.0; }

double FiberProblem::log_scale() const { return 2.0 * phi_min() / h_ + 0.5 * std::log(h_); }

namespace {

void check_resolution(const FiberProblem& prob) {
  if (!prob.hooks().potential) return;
  const auto& f = prob.potential().features();
  const double dr = prob.spacing();
  const double well = std::sqrt(prob.h() / f.curvature);
  const double layer = prob.h() / std::max(f.dn_phi_inner, f.dn_phi_outer);
  if (well < 4.0 * dr || layer < dr) {
    std::ostringstream msg;
    msg << "grid of " << prob.n_grid() << " cells cannot resolve the weight e^{-2(phi-phi_min)/h} at h=" << prob.h()
        << " (well width " << well << ", boundary layer " << layer << ", cell " << dr << "); increase n_grid";
    throw ResolutionError(msg.str());
  }
}

}  // namespace

TridiagonalSym assemble_direct(const FiberProblem& prob) {
  const std::size_t n = prob.n_grid();
  const double h = prob.h();
  const double dr = prob.spacing();
  const double h2 = h * h;
  const double kinetic = h2 / (dr * dr);
  const double spin_sign = prob.spin() == SpinBlock::minus ? -1.0 : 1.0;
  const double quarter = prob.hooks().quarter_term ? 1.0 : 0.0;

  std::vector<double> diag(n - 1);
  std::vector<double> off(n - 2, -kinetic);
  for (std::size_t i = 1; i < n; ++i) {
    const double r = prob.radius(i);
    const double drift = h * prob.m_tilde() / r - prob.dphi_node(i);
    diag[i - 1] = 2.0 * kinetic - quarter * h2 / (4.0 * r * r) + drift * drift + spin_sign * h * prob.field_at(r);
  }
  TridiagonalSym mat(std::move(diag), std::move(off));
  mat.check_finite();
  return mat;
}

TridiagonalSym WeightedSystem::reduced() const {
  // factor couplings alternate a_j (row j-1, node j) and b_j (row j, node j).
  const auto& c = factor.couplings;
  const std::size_t nodes = c.size() / 2;
  std::vector<double> diag(nodes);
  std::vector<double> off(nodes > 0 ? nodes - 1 : 0);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double a = c[2 * j];
    const double b = c[2 * j + 1];
    diag[j] = a * a + b * b;
    if (j + 1 < nodes) off[j] = b * c[2 * j + 2];
  }
  return TridiagonalSym(std::move(diag), std::move(off));
}

WeightedSystem assemble_weighted(const FiberProblem& prob) {
  if (prob.formulation() != Formulation::weighted && prob.spin() == SpinBlock::plus) {
    throw DomainError("the weighted formulation only represents the minus spin block");
  }
  check_resolution(prob);
  const std::size_t n = prob.n_grid();
  const double h = prob.h();
  const double dr = prob.spacing();
  const double phi_min = prob.phi_min();
  const double shift = prob.m_tilde() + 0.5;

  // Nodes 0..n, edges 0..n-1 (edge e joins nodes e and e+1).
  std::vector<double> phi_node(n + 1);
  std::vector<double> phi_edge(n);
  for (std::size_t i = 0; i <= n; ++i) phi_node[i] = prob.phi(prob.radius(i));
  for (std::size_t e = 0; e < n; ++e) phi_edge[e] = prob.phi(prob.radius(e) + 0.5 * dr);

  WeightedSystem sys;
  sys.edge_weight.resize(n);
  sys.edge_left.resize(n);
  sys.edge_right.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    const double re = prob.radius(e) + 0.5 * dr;
    const double c = shift / re;
    sys.edge_weight[e] = std::exp(-2.0 * (phi_edge[e] - phi_min) / h);
    sys.edge_left[e] = -1.0 / dr - 0.5 * c;
    sys.edge_right[e] = 1.0 / dr - 0.5 * c;
  }

  sys.mass_diag.resize(n - 1);
  for (std::size_t j = 1; j < n; ++j) sys.mass_diag[j - 1] = dr * std::exp(-2.0 * (phi_node[j] - phi_min) / h);
  if (std::all_of(sys.mass_diag.begin(), sys.mass_diag.end(), [](double m) { return m == 0.0; }) ||
      std::any_of(sys.mass_diag.begin(), sys.mass_diag.end(), [](double m) { return !(m > 0.0); })) {
    throw ResolutionError("mass weights underflowed to zero; h is too small for this grid (increase n_grid)");
  }

  const double h2dr = h * h * dr;
  std::vector<double> kd(n - 1);
  std::vector<double> ko(n - 2);
  for (std::size_t j = 1; j < n; ++j) {
    const auto left_edge = j - 1;
    const auto right_edge = j;
    kd[j - 1] = h2dr * (sys.edge_weight[left_edge] * sys.edge_right[left_edge] * sys.edge_right[left_edge] +
                        sys.edge_weight[right_edge] * sys.edge_left[right_edge] * sys.edge_left[right_edge]);
    if (j + 1 < n) {
      ko[j - 1] = h2dr * sys.edge_weight[right_edge] * sys.edge_left[right_edge] * sys.edge_right[right_edge];
    }
  }
  sys.stiffness = TridiagonalSym(std::move(kd), std::move(ko));

  // B[e, j] = h sqrt(dr w_e) coef / sqrt(dr w_j) = h e^{-(phi_e - phi_j)/h} coef.
  sys.factor.couplings.resize(2 * (n - 1));
  for (std::size_t j = 1; j < n; ++j) {
    const double from_left = h * std::exp(-(phi_edge[j - 1] - phi_node[j]) / h) * sys.edge_right[j - 1];
    const double from_right = h * std::exp(-(phi_edge[j] - phi_node[j]) / h) * sys.edge_left[j];
    sys.factor.couplings[2 * (j - 1)] = from_left;
    sys.factor.couplings[2 * (j - 1) + 1] = from_right;
  }
  sys.stiffness.check_finite();
  return sys;
}

std::vector<double> fiber_eigenvalues(const FiberProblem& prob, std::size_t k, double rel_tol) {
  if (prob.formulation() == Formulation::direct) return smallest_eigenvalues(assemble_direct(prob), k, rel_tol);
  const auto sys = assemble_weighted(prob);
  auto sigma = smallest_singular_values(sys.factor, k, rel_tol);
  for (double& s : sigma) s *= s;
  return sigma;
}

double kernel_residual(const FiberProblem& prob) {
  check_resolution(prob);
  const std::size_t n = prob.n_grid();
  const double h = prob.h();
  const double dr = prob.spacing();
  const double phi_min = prob.phi_min();
  const double shift = prob.m_tilde() + 0.5;

  std::vector<double> u(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = prob.radius(i);
    u[i] = std::exp(-(prob.phi(r) - phi_min) / h + shift * std::log(r));
  }
  double num = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double r = prob.radius(i);
    const double du = (u[i + 1] - u[i - 1]) / (2.0 * dr);
    const double res = h * (du - shift / r * u[i] + prob.dphi_node(i) / h * u[i]);
    num += dr * res * res;
  }
  double den = 0.5 * dr * (u.front() * u.front() + u.back() * u.back());
  for (std::size_t i = 1; i < n; ++i) den += dr * u[i] * u[i];
  if (!(den > 0.0) || !std::isfinite(den)) throw ResolutionError("kernel vector underflowed; increase h or n_grid");
  return std::sqrt(num / den);
}

double default_boundary_width(double h) { return std::pow(h, 0.7); }

double variational_upper_bound(const FiberProblem& prob, double eps) {
  const auto& geom = prob.potential().geometry();
  if (!(eps > 0.0 && eps < 0.5 * geom.width())) {
    std::ostringstream msg;
    msg << "boundary-layer width eps must lie in (0, (rho2-rho1)/2); got " << eps;
    throw DomainError(msg.str());
  }
  const auto sys = assemble_weighted(FiberProblem(prob.potential(), prob.field(), prob.h(), prob.m_tilde(),
                                                  prob.n_grid(), Formulation::weighted, SpinBlock::minus,
                                                  AssemblyHooks{true, prob.hooks().potential, prob.hooks().potential}));
  const std::size_t n = prob.n_grid();
  const double h = prob.h();
  const auto& f = prob.potential().features();
  const double a_in = prob.hooks().potential ? f.dn_phi_inner : 0.0;
  const double a_out = prob.hooks().potential ? f.dn_phi_outer : 0.0;

  // Minimizer of int_0^eps e^{2 a tau/h} |P'|^2 with P(0) = 0, P(eps) = 1.
  auto profile = [h, eps](double tau, double a) {
    const double k = 2.0 * a / h;
    if (k * eps < 1e-12) return tau / eps;
    return std::expm1(-k * tau) / std::expm1(-k * eps);
  };

  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = prob.radius(i);
    double chi = 1.0;
    if (r - geom.rho1 < eps) chi = profile(r - geom.rho1, a_in);
    if (geom.rho2 - r < eps) chi = std::min(chi, profile(geom.rho2 - r, a_out));
    v[i] = chi * std::pow(r, prob.m_tilde() + 0.5);
  }
  v.front() = 0.0;
  v.back() = 0.0;

  double num = 0.0;
  for (std::size_t e = 0; e < n; ++e) {
    const double dv = sys.edge_left[e] * v[e] + sys.edge_right[e] * v[e + 1];
    num += sys.edge_weight[e] * dv * dv;
  }
  num *= h * h * prob.spacing();
  double den = 0.0;
  for (std::size_t j = 1; j < n; ++j) den += sys.mass_diag[j - 1] * v[j] * v[j];
  return num / den;
}

UpperBoundScan scan_upper_bound(const FiberProblem& prob) {
  UpperBoundScan scan;
  scan.best = std::numeric_limits<double>::infinity();
  const double half_width = 0.5 * prob.potential().geometry().width();
  for (int step = 0; step <= 8; ++step) {
    const double a = (55.0 + 5.0 * step) / 100.0;
    const double eps = std::pow(prob.h(), a);
    if (!(eps < half_width)) continue;
    const double bound = variational_upper_bound(prob, eps);
    scan.exponents.push_back(a);
    scan.bounds.push_back(bound);
    if (bound < scan.best) {
      scan.best = bound;
      scan.best_eps = eps;
    }
  }
  if (scan.bounds.empty()) throw DomainError("no boundary-layer width h^a with a in [0.55, 0.95] fits the annulus");
  return scan;
}

FiberSpectrum solve_fiber(const FiberProblem& prob, const FiberSolveOptions& options) {
  const auto lambdas = fiber_eigenvalues(prob, 2, options.rel_tol);
  FiberSpectrum out;
  out.lambda1 = lambdas[0];
  out.lambda2 = lambdas[1];
  out.log_scale = prob.log_scale();
  const double inv_scale = std::exp(-out.log_scale);
  out.prefactor1 = out.lambda1 * inv_scale;
  out.prefactor2 = out.lambda2 * inv_scale;
  out.grid_used = prob.n_grid();
  out.formulation = prob.formulation();
  out.kernel_residual = std::numeric_limits<double>::quiet_NaN();
  out.upper_bound = std::numeric_limits<double>::quiet_NaN();
  out.upper_bound_prefactor = std::numeric_limits<double>::quiet_NaN();
  if (options.diagnostics && prob.spin() == SpinBlock::minus && prob.hooks().quarter_term &&
      prob.hooks().potential == prob.hooks().field) {
    out.kernel_residual = kernel_residual(prob);
    const double eps = std::min(default_boundary_width(prob.h()), 0.45 * prob.potential().geometry().width());
    out.upper_bound = variational_upper_bound(prob, eps);
    out.upper_bound_prefactor = out.upper_bound * inv_scale;
    if (prob.formulation() == Formulation::weighted && out.lambda1 > out.upper_bound * (1.0 + 1e-10)) {
      throw InternalError("Rayleigh quotient of the trial vector fell below the smallest eigenvalue");
    }
  }
  return out;
}

void write_matrix_csv(std::ostream& out, const TridiagonalSym& mat) {
  csv::row(out, {"i", "diag", "offdiag"});
  for (std::size_t i = 0; i < mat.size(); ++i) {
    csv::row(out, {csv::number(static_cast<long long>(i)), csv::number(mat.diag[i]),
                   i < mat.offdiag.size() ? csv::number(mat.offdiag[i]) : std::string()});
  }
}

}  // namespace pauli_annulus
