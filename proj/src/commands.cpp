#include "pauli_annulus/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "pauli_annulus/asymptotics.hpp"
#include "pauli_annulus/csv.hpp"
#include "pauli_annulus/errors.hpp"
#include "pauli_annulus/fiber_solver.hpp"
#include "pauli_annulus/gauge.hpp"
#include "pauli_annulus/spectrum.hpp"
#include "pauli_annulus/tridiagonal.hpp"
#include "pauli_annulus/version.hpp"

namespace pauli_annulus {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

using csv::number;

std::string number(std::int64_t v) { return std::to_string(v); }
std::string number(std::size_t v) { return std::to_string(v); }
std::string boolean(bool v) { return v ? "true" : "false"; }

ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

struct Context {
  const RunConfig& cfg;
  RadialField field;
  ScalarPotential pot;
  GaugeData gauge;
  PrefactorLaw law;
  fs::path out_dir;
  unsigned threads;

  Context(const RunConfig& c, const RunOptions& options)
      : cfg(c),
        field(c.make_field()),
        pot(solve_scalar_potential(c.geometry, field, c.numerics.n_grid)),
        gauge(make_gauge(pot, c.circulation().value_or(potential_gauge_circulation(pot)), c.gauge.p)),
        law(PrefactorLaw::from_potential(pot)),
        out_dir(options.out_dir.value_or(c.output.directory)),
        threads(std::max(1u, options.threads)) {}

  SpectrumOptions spectrum_options() const {
    SpectrumOptions o;
    o.k_max = cfg.experiment.k_max;
    o.n_grid = cfg.numerics.n_grid;
    o.window = cfg.numerics.window;
    o.formulation = cfg.numerics.formulation;
    o.rel_tol = cfg.numerics.eig_tol;
    o.threads = threads;
    return o;
  }

  void write(const std::string& name, const std::string& content) const {
    fs::create_directories(out_dir);
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("error while writing " + path.string());
  }

  void write_csv(const std::string& name, const std::ostringstream& content) const {
    if (cfg.output.csv) write(name, content.str());
  }

  void write_summary(const std::string& command, const ordered_json& results) const {
    if (!cfg.output.json) return;
    const auto& f = pot.features();
    ordered_json s;
    s["format_version"] = kFormatVersion;
    s["software"] = kSoftwareName;
    s["software_version"] = kSoftwareVersion;
    s["command"] = command;
    s["geometry"] = {{"rho1", cfg.geometry.rho1}, {"rho2", cfg.geometry.rho2}};
    ordered_json fj;
    fj["kind"] = to_string(field.kind());
    switch (cfg.field.kind) {
      case FieldKind::constant:
        fj["value"] = cfg.field.value;
        break;
      case FieldKind::polynomial:
        fj["coefficients"] = cfg.field.coefficients;
        break;
      case FieldKind::table:
        fj["r"] = cfg.field.table_r;
        fj["B"] = cfg.field.table_b;
        break;
    }
    s["field"] = fj;
    s["n_grid"] = cfg.numerics.n_grid;
    s["eig_tol"] = cfg.numerics.eig_tol;
    s["formulation"] = to_string(cfg.numerics.formulation);
    s["phi_min"] = f.phi_min;
    s["r_min"] = f.r_min;
    s["curvature"] = f.curvature;
    s["curvature_from_phi"] = f.curvature_from_phi;
    s["dn_inner"] = f.dn_phi_inner;
    s["dn_outer"] = f.dn_phi_outer;
    s["b0"] = f.b0;
    s["c0"] = gauge.c0;
    s["circulation"] = gauge.circ_int_A;
    s["p"] = gauge.p;
    s["q_inner"] = law.q_inner;
    s["q_outer"] = law.q_outer;
    s["f_minimizer"] = f_minimizer(law);
    s["f_lower_bound"] = law.lower_bound();
    s["results"] = results;
    write("summary.json", s.dump(2) + "\n");
  }
};

double require_h(const RunConfig& cfg, const char* command) {
  if (cfg.experiment.h) return *cfg.experiment.h;
  const auto list = cfg.resolved_h_list();
  if (list.size() == 1) return list.front();
  throw ConfigError(exit_code::invalid_config,
                    std::string("experiment.h: required by the ") + command + " command");
}

std::vector<double> require_h_list(const RunConfig& cfg, const char* command, std::size_t min_count) {
  const auto list = cfg.resolved_h_list();
  if (list.size() < min_count) {
    throw ConfigError(exit_code::invalid_config, "experiment.h_list: the " + std::string(command) +
                                                     " command needs at least " + std::to_string(min_count) +
                                                     " values of h (experiment.h_list or experiment.h_range)");
  }
  return list;
}

void fiber_header(std::ostream& out) {
  csv::row(out, {"h", "m", "m_tilde", "j", "log_scale", "mantissa", "kernel_residual", "upper_bound_mantissa"});
}

void fiber_rows(std::ostream& out, double h, const std::string& m, double m_tilde, const FiberSpectrum& s) {
  csv::row(out, {number(h), m, number(m_tilde), "1", number(s.log_scale), number(s.prefactor1),
                 number(s.kernel_residual), number(s.upper_bound_prefactor)});
  csv::row(out, {number(h), m, number(m_tilde), "2", number(s.log_scale), number(s.prefactor2),
                 number(s.kernel_residual), number(s.upper_bound_prefactor)});
}

void cmd_potential(const Context& ctx) {
  std::ostringstream out;
  write_potential_csv(out, ctx.pot);
  ctx.write_csv("phi.csv", out);
  ordered_json r;
  r["rows"] = ctx.pot.grid().size();
  ctx.write_summary("potential", r);
}

void cmd_fiber(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double h = require_h(cfg, "fiber");
  const std::int64_t m = cfg.experiment.m.value_or(0);
  const double m_tilde = cfg.experiment.m_tilde ? *cfg.experiment.m_tilde : real_momentum(m, ctx.gauge, h);
  const std::string m_field = cfg.experiment.m_tilde ? std::string() : number(m);
  // The weighted form only exists for the minus block.
  const Formulation formulation =
      cfg.experiment.spin == SpinBlock::plus ? Formulation::direct : cfg.numerics.formulation;
  const FiberProblem prob(ctx.pot, ctx.field, h, m_tilde, cfg.numerics.n_grid, formulation, cfg.experiment.spin);
  const auto spec = solve_fiber(prob, {cfg.numerics.eig_tol, true});

  std::ostringstream table;
  fiber_header(table);
  fiber_rows(table, h, m_field, m_tilde, spec);
  ctx.write_csv("fiber.csv", table);

  const TridiagonalSym mat =
      formulation == Formulation::direct ? assemble_direct(prob) : assemble_weighted(prob).reduced();
  std::ostringstream matrix;
  write_matrix_csv(matrix, mat);
  ctx.write_csv("matrix.csv", matrix);

  // With the lumped mass the reduced eigenvector is the fiber function itself
  // (up to normalization), so both formulations dump comparable profiles.
  const auto vec = eigenvector(mat, spec.lambda1);
  const double norm = 1.0 / std::sqrt(prob.spacing());
  std::ostringstream ev;
  csv::row(ev, {"r", "u"});
  for (std::size_t i = 0; i < vec.size(); ++i) csv::row(ev, {number(prob.radius(i + 1)), number(vec[i] * norm)});
  ctx.write_csv("eigenvector.csv", ev);

  ordered_json r;
  r["h"] = h;
  if (!cfg.experiment.m_tilde) r["m"] = m;
  r["m_tilde"] = m_tilde;
  r["spin"] = cfg.experiment.spin == SpinBlock::minus ? "minus" : "plus";
  r["formulation"] = to_string(formulation);
  r["log_scale"] = spec.log_scale;
  r["lambda1"] = spec.lambda1;
  r["lambda2"] = spec.lambda2;
  r["prefactor1"] = spec.prefactor1;
  r["prefactor2"] = spec.prefactor2;
  r["gap_bound"] = 2.0 * h * ctx.pot.features().b0;
  if (cfg.experiment.spin == SpinBlock::minus) {
    r["kernel_residual"] = finite_or_null(spec.kernel_residual);
    r["upper_bound_prefactor"] = finite_or_null(spec.upper_bound_prefactor);
    r["f_at_m_tilde"] = f_eval(ctx.law, m_tilde);
    const double eps = std::pow(h, cfg.experiment.eps_exponent);
    if (eps < 0.5 * cfg.geometry.width()) {
      const double inv_scale = std::exp(-spec.log_scale);
      r["eps_exponent"] = cfg.experiment.eps_exponent;
      r["upper_bound_at_eps_prefactor"] = variational_upper_bound(prob, eps) * inv_scale;
      const auto scan = scan_upper_bound(prob);
      ordered_json sj = ordered_json::array();
      for (std::size_t i = 0; i < scan.exponents.size(); ++i) {
        sj.push_back({{"exponent", scan.exponents[i]}, {"prefactor", scan.bounds[i] * inv_scale}});
      }
      r["upper_bound_scan"] = sj;
    }
    try {
      r["upper_bound_constant"] = upper_bound_constant(ctx.law, cfg.geometry, m_tilde, h);
    } catch (const DomainError&) {
      r["upper_bound_constant"] = nullptr;
    }
  }
  ctx.write_summary("fiber", r);
}

void cmd_asymptotics(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto h_list = cfg.resolved_h_list();
  validate_h_list(h_list);
  const std::size_t kmax = cfg.experiment.k_max;

  std::ostringstream out;
  csv::row(out, {"h", "c0_over_h", "gamma_frac", "k", "alpha_k", "realizing_m", "log_scale"});
  ordered_json rows = ordered_json::array();
  for (double h : h_list) {
    const auto flux = flux_at_scale(ctx.gauge, h);
    const auto alpha = alpha_k(ctx.law, flux.gamma_frac, kmax);
    const double log_scale = 2.0 * ctx.pot.features().phi_min / h + 0.5 * std::log(h);
    for (std::size_t k = 0; k < kmax; ++k) {
      // Integers are reported in the gauge where m~ = m - gamma(h).
      csv::row(out, {number(h), number(ctx.gauge.c0 / h), number(flux.gamma_frac), number(k + 1),
                     number(alpha.values[k]), number(alpha.realizing[k]), number(log_scale)});
    }
    rows.push_back({{"h", h}, {"gamma_frac", flux.gamma_frac}, {"alpha", alpha.values}});
  }
  ctx.write_csv("asymptotics.csv", out);

  ordered_json r;
  const double xs = f_minimizer(ctx.law);
  r["f_minimizer"] = xs;
  r["f_min"] = f_eval(ctx.law, xs);
  r["stationarity_residual"] = stationarity_residual(ctx.law, xs);
  r["f_at_integers"] = ordered_json::object();
  for (int m = -3; m <= 3; ++m) r["f_at_integers"][std::to_string(m)] = f_eval(ctx.law, m);
  r["scales"] = rows;
  ctx.write_summary("asymptotics", r);
}

void write_fibers_csv(const Context& ctx, const AssembledSpectrum& spec) {
  std::ostringstream out;
  fiber_header(out);
  for (const auto& s : spec.scales) {
    for (const auto& rec : s.fibers) fiber_rows(out, s.h, number(rec.m), rec.m_tilde, rec.spectrum);
  }
  ctx.write_csv("fibers.csv", out);
}

void cmd_spectrum(const Context& ctx) {
  const auto h_list = require_h_list(ctx.cfg, "spectrum", 1);
  const auto spec = assemble(ctx.pot, ctx.field, ctx.gauge, h_list, ctx.spectrum_options());
  const std::size_t kmax = ctx.cfg.experiment.k_max;

  std::ostringstream out;
  csv::row(out, {"h", "k", "m", "m_tilde", "j", "log_scale", "mantissa", "predicted_alpha", "ratio"});
  ordered_json scales = ordered_json::array();
  for (const auto& s : spec.scales) {
    for (std::size_t k = 0; k < kmax; ++k) {
      const auto& e = s.entries[k];
      csv::row(out, {number(s.h), number(k + 1), number(e.m), number(e.m_tilde), number(e.j),
                     number(e.value.log_scale), number(e.value.mantissa), number(s.predicted.values[k]),
                     number(s.ratio[k])});
    }
    scales.push_back({{"h", s.h},
                      {"gamma_frac", s.flux.gamma_frac},
                      {"window", {s.window_lo, s.window_hi}},
                      {"fibers", s.fibers.size()},
                      {"ratio", s.ratio}});
  }
  ctx.write_csv("spectrum.csv", out);
  write_fibers_csv(ctx, spec);
  ordered_json r;
  r["k_max"] = kmax;
  r["scales"] = scales;
  ctx.write_summary("spectrum", r);
}

void cmd_ab_sweep(const Context& ctx) {
  const auto h_list = require_h_list(ctx.cfg, "ab-sweep", 1);
  validate_h_list(h_list);
  const auto rows = ab_sweep(ctx.pot, ctx.field, ctx.gauge, h_list, ctx.spectrum_options());

  std::ostringstream out;
  csv::row(out, {"h", "c0_over_h", "gamma_frac", "numeric_prefactor", "predicted_alpha1", "ratio", "realizing_m",
                 "m_tilde"});
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& row : rows) {
    csv::row(out, {number(row.h), number(row.c0_over_h), number(row.gamma_frac), number(row.numeric_prefactor),
                   number(row.predicted_alpha1), number(row.numeric_prefactor / row.predicted_alpha1),
                   number(row.realizing_m), number(row.m_tilde)});
    lo = std::min(lo, row.predicted_alpha1);
    hi = std::max(hi, row.predicted_alpha1);
  }
  ctx.write_csv("ab_sweep.csv", out);
  ordered_json r;
  r["points"] = rows.size();
  r["predicted_alpha1_min"] = lo;
  r["predicted_alpha1_max"] = hi;
  r["predicted_oscillation"] = hi - lo;
  ctx.write_summary("ab-sweep", r);
}

void cmd_converge(const Context& ctx) {
  const auto h_list = require_h_list(ctx.cfg, "converge", 3);
  const auto spec = assemble(ctx.pot, ctx.field, ctx.gauge, h_list, ctx.spectrum_options());
  const auto study = convergence_study(spec);
  const std::size_t kmax = ctx.cfg.experiment.k_max;

  std::ostringstream out;
  {
    std::vector<std::string> header{"h"};
    for (const char* col : {"ratio_", "diff_", "approaching_", "rate_"}) {
      for (std::size_t k = 1; k <= kmax; ++k) header.push_back(col + std::to_string(k));
    }
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\r\n";
  }
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    const auto& row = study.rows[i];
    std::vector<std::string> fields{number(row.h)};
    for (double v : row.ratio) fields.push_back(number(v));
    for (std::size_t k = 0; k < kmax; ++k) fields.push_back(i == 0 ? "" : number(row.diff[k]));
    for (std::size_t k = 0; k < kmax; ++k) fields.push_back(i == 0 ? "" : boolean(row.approaching[k]));
    // Empirical exponent of |ratio - 1| in h between consecutive rows.
    for (std::size_t k = 0; k < kmax; ++k) {
      if (i == 0) {
        fields.push_back("");
        continue;
      }
      const auto& prev = study.rows[i - 1];
      fields.push_back(number(std::log(std::abs(row.ratio[k] - 1.0) / std::abs(prev.ratio[k] - 1.0)) /
                              std::log(row.h / prev.h)));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) out << (j ? "," : "") << fields[j];
    out << "\r\n";
  }
  ctx.write_csv("converge.csv", out);
  write_fibers_csv(ctx, spec);

  ordered_json r;
  ordered_json mono = ordered_json::array();
  for (bool b : study.monotone) mono.push_back(b);
  r["monotone"] = mono;
  ordered_json rows = ordered_json::array();
  for (const auto& row : study.rows) rows.push_back({{"h", row.h}, {"ratio", row.ratio}});
  r["rows"] = rows;
  ctx.write_summary("converge", r);
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* label, double v) { return std::string(label) + "=" + number(v); }

FieldConfig scaled_field(const FieldConfig& f, double c) {
  FieldConfig out = f;
  out.value *= c;
  for (auto& a : out.coefficients) a *= c;
  for (auto& b : out.table_b) b *= c;
  return out;
}

std::vector<CheckResult> run_selftest(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double h = cfg.experiment.h.value_or(0.1);
  const auto n = cfg.numerics.n_grid;
  const auto& pot = ctx.pot;
  const auto& feat = pot.features();
  std::vector<CheckResult> results;
  auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    CheckResult r{name, false, {}};
    try {
      std::tie(r.passed, r.detail) = body();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(r);
  };

  check("potential_dirichlet", [&] {
    const auto phi = pot.phi();
    return std::pair{phi.front() == 0.0 && phi.back() == 0.0,
                     fmt("phi(rho1)", phi.front()) + " " + fmt("phi(rho2)", phi.back())};
  });

  check("potential_linear_in_field", [&] {
    RunConfig scaled = cfg;
    scaled.field = scaled_field(cfg.field, 2.0);
    const auto field2 = scaled.make_field();
    const auto pot2 = solve_scalar_potential(cfg.geometry, field2, n);
    double err = 0.0;
    double size = 0.0;
    for (std::size_t i = 0; i < pot.phi().size(); ++i) {
      err = std::max(err, std::abs(pot2.phi()[i] - 2.0 * pot.phi()[i]));
      size = std::max(size, std::abs(pot.phi()[i]));
    }
    return std::pair{err <= 1e-12 * size, fmt("max_abs_diff", err)};
  });

  check("potential_minimum_negative", [&] {
    return std::pair{feat.phi_min < 0.0 && feat.r_min > cfg.geometry.rho1 && feat.r_min < cfg.geometry.rho2,
                     fmt("phi_min", feat.phi_min) + " " + fmt("r_min", feat.r_min)};
  });

  check("weight_bounded_by_one", [&] {
    const FiberProblem prob(pot, ctx.field, h, 0.0, n, Formulation::weighted);
    const auto sys = assemble_weighted(prob);
    double wmax = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < sys.mass_diag.size(); ++i) {
      const double w = sys.mass_diag[i] / prob.spacing();
      if (w > wmax) {
        wmax = w;
        imax = i;
      }
    }
    const bool near = std::abs(prob.radius(imax + 1) - feat.r_min) <= prob.spacing() * (1.0 + 1e-12);
    return std::pair{wmax <= 1.0 && wmax > 0.999 && near, fmt("max_weight", wmax)};
  });

  check("potential_gauge_c0_zero", [&] {
    const auto g = make_gauge(pot, potential_gauge_circulation(pot));
    return std::pair{std::abs(g.c0) <= 1e-14 * std::max(1.0, std::abs(cfg.geometry.rho1 * pot.dphi()[0])),
                     fmt("c0", g.c0)};
  });

  check("circulation_shift_moves_c0", [&] {
    double worst = 0.0;
    for (std::int64_t p : {-2, -1, 1, 3}) {
      const auto shifted = make_gauge(pot, ctx.gauge.circ_int_A + 2.0 * std::numbers::pi * h * p);
      worst = std::max(worst, std::abs(shifted.c0 - (ctx.gauge.c0 - h * p)));
    }
    return std::pair{worst <= 1e-12, fmt("max_abs_diff", worst)};
  });

  check("gauge_shift_bitwise", [&] {
    const GaugeData g1{ctx.gauge.circ_int_A, ctx.gauge.c0, 1};
    const GaugeData g2{ctx.gauge.circ_int_A, ctx.gauge.c0, 2};
    const FiberProblem a(pot, ctx.field, h, real_momentum(3, g1, h), n, Formulation::direct);
    const FiberProblem b(pot, ctx.field, h, real_momentum(4, g2, h), n, Formulation::direct);
    const auto ma = assemble_direct(a);
    const auto mb = assemble_direct(b);
    const FiberProblem wa(pot, ctx.field, h, real_momentum(3, g1, h), n);
    const FiberProblem wb(pot, ctx.field, h, real_momentum(4, g2, h), n);
    const bool same = ma.diag == mb.diag && ma.offdiag == mb.offdiag &&
                      assemble_weighted(wa).factor.couplings == assemble_weighted(wb).factor.couplings;
    return std::pair{same, std::string(same ? "identical" : "differ")};
  });

  check("alpha_periodic_in_flux", [&] {
    double worst = 0.0;
    for (double c : {0.0, 0.013, 0.37, -0.41}) {
      const auto f1 = flux_at_scale(GaugeData{0.0, c, 0}, h);
      const auto f2 = flux_at_scale(GaugeData{0.0, c + h, 0}, h);
      const double a1 = alpha_k(ctx.law, f1.gamma_frac, 2).value;
      const double a2 = alpha_k(ctx.law, f2.gamma_frac, 2).value;
      worst = std::max(worst, std::abs(a1 - a2) / a1);
    }
    return std::pair{worst <= 1e-12, fmt("max_rel_diff", worst)};
  });

  check("prefactor_convex", [&] {
    bool ok = true;
    for (int i = -40; i <= 40; ++i) {
      const double x = 0.1 * i;
      if (f_eval(ctx.law, x - 1.0) + f_eval(ctx.law, x + 1.0) < 2.0 * f_eval(ctx.law, x)) ok = false;
    }
    return std::pair{ok, std::string("x in [-4, 4]")};
  });

  check("alpha_nondecreasing_in_k", [&] {
    const auto a = alpha_k(ctx.law, 0.3, 4);
    bool ok = true;
    for (std::size_t k = 1; k < a.values.size(); ++k) ok = ok && a.values[k - 1] <= a.values[k];
    return std::pair{ok, fmt("alpha_4", a.value)};
  });

  check("dirichlet_laplacian_closed_form", [&] {
    const std::size_t nl = 1000;
    const double d = 1.0 / static_cast<double>(nl);
    TridiagonalSym lap(std::vector<double>(nl - 1, 2.0 / (d * d)), std::vector<double>(nl - 2, -1.0 / (d * d)));
    const auto ev = smallest_eigenvalues(lap, 10, 1e-14);
    double worst = 0.0;
    for (std::size_t j = 1; j <= 10; ++j) {
      const double s = std::sin(0.5 * static_cast<double>(j) * std::numbers::pi * d);
      const double exact = 4.0 * s * s / (d * d);
      worst = std::max(worst, std::abs(ev[j - 1] - exact) / exact);
    }
    return std::pair{worst <= 1e-10, fmt("max_rel_err", worst)};
  });

  check("diagonal_matrix_spectrum", [&] {
    const std::vector<double> d{3.0, -1.0, 2.5, 0.25, 7.0};
    const auto ev = smallest_eigenvalues(TridiagonalSym(d, std::vector<double>(4, 0.0)), 5);
    auto sorted = d;
    std::sort(sorted.begin(), sorted.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < 5; ++i) worst = std::max(worst, std::abs(ev[i] - sorted[i]));
    return std::pair{worst <= 1e-12 * 7.0, fmt("max_abs_err", worst)};
  });

  const double m_center = std::round(f_minimizer(ctx.law));
  check("rayleigh_upper_bound", [&] {
    const FiberProblem prob(pot, ctx.field, h, m_center, n);
    const auto spec = solve_fiber(prob, {cfg.numerics.eig_tol, true});
    return std::pair{spec.upper_bound >= spec.lambda1,
                     fmt("lambda1", spec.lambda1) + " " + fmt("bound", spec.upper_bound)};
  });

  check("spectral_gap_minus_block", [&] {
    const FiberProblem prob(pot, ctx.field, h, m_center, n);
    const auto spec = solve_fiber(prob, {cfg.numerics.eig_tol, false});
    const double gap = 2.0 * h * feat.b0 * 0.99;
    return std::pair{spec.lambda2 >= gap, fmt("lambda2", spec.lambda2) + " " + fmt("bound", gap)};
  });

  check("spectral_gap_plus_block", [&] {
    const FiberProblem prob(pot, ctx.field, h, m_center, n, Formulation::direct, SpinBlock::plus);
    const auto ev = fiber_eigenvalues(prob, 1, cfg.numerics.eig_tol);
    const double gap = 2.0 * h * feat.b0 * 0.99;
    return std::pair{ev[0] >= gap, fmt("lambda1", ev[0]) + " " + fmt("bound", gap)};
  });

  check("log_scaled_order", [&] {
    const LogScaled a{-100.0, 2.0};
    const LogScaled b{-100.0 + std::log(2.0), 1.5};
    const LogScaled c{-99.0, 2.0};
    const bool ok = compare(a, b) < 0 && compare(b, c) < 0 && compare(a, a) == 0;
    return std::pair{ok, std::string()};
  });

  return results;
}

void cmd_selftest(const Context& ctx) {
  const auto results = run_selftest(ctx);
  std::ostringstream out;
  csv::row(out, {"check", "passed", "detail"});
  std::size_t failed = 0;
  ordered_json checks = ordered_json::object();
  for (const auto& r : results) {
    csv::row(out, {csv::field(r.name), boolean(r.passed), csv::field(r.detail)});
    checks[r.name] = r.passed;
    if (!r.passed) ++failed;
  }
  ctx.write_csv("selftest.csv", out);
  ordered_json s;
  s["checks"] = checks;
  s["failed"] = failed;
  ctx.write_summary("selftest", s);
  if (failed > 0) {
    std::string names;
    for (const auto& r : results) {
      if (!r.passed) names += (names.empty() ? "" : ", ") + r.name;
    }
    throw InternalError("selftest failed: " + names);
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"potential", "fiber",    "asymptotics", "spectrum",
                                              "ab-sweep",  "converge", "selftest"};
  return names;
}

void execute(const std::string& command, const RunConfig& cfg, const RunOptions& options) {
  static const std::vector<std::pair<std::string, void (*)(const Context&)>> table{
      {"potential", cmd_potential}, {"fiber", cmd_fiber},       {"asymptotics", cmd_asymptotics},
      {"spectrum", cmd_spectrum},   {"ab-sweep", cmd_ab_sweep}, {"converge", cmd_converge},
      {"selftest", cmd_selftest}};
  for (const auto& [name, fn] : table) {
    if (name == command) {
      const Context ctx(cfg, options);
      fn(ctx);
      return;
    }
  }
  throw ConfigError(exit_code::usage, "unknown command '" + command + "'");
}

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const DomainError& e) {
    err << "error: invalid input: " << e.what() << "\n";
    return exit_code::invalid_config;
  } catch (const NumericalGuardError& e) {
    err << "error: numerical guard: " << e.what() << "\n";
    return exit_code::numerical_guard;
  } catch (const InternalError& e) {
    err << "error: internal check failed: " << e.what() << "\n";
    return exit_code::internal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::internal;
  }
}

int run(const std::string& command, const RunConfig& cfg, const RunOptions& options, std::ostream& err) {
  try {
    execute(command, cfg, options);
    return exit_code::ok;
  } catch (...) {
    return exit_code_for_current_exception(err);
  }
}

}  // namespace pauli_annulus
