#include "pauli_annulus/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "pauli_annulus/errors.hpp"
#include "pauli_annulus/parallel.hpp"

namespace pauli_annulus {

bool entry_less(const SpectralEntry& a, const SpectralEntry& b) {
  const int c = compare(a.value, b.value);
  if (c != 0) return c < 0;
  if (a.m != b.m) return a.m < b.m;
  return a.j < b.j;
}

void validate_h_list(const std::vector<double>& h_list) {
  if (h_list.empty()) throw DomainError("h list must not be empty");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0) || !std::isfinite(h_list[i])) {
      std::ostringstream msg;
      msg << "h list entry " << i << " must be positive (got " << h_list[i] << ")";
      throw DomainError(msg.str());
    }
    if (i > 0 && !(h_list[i] < h_list[i - 1])) throw DomainError("h list must be sorted in strictly descending order");
  }
}

SpectrumAtScale assemble_at_scale(const ScalarPotential& pot, const RadialField& field, const GaugeData& gauge,
                                  double h, const SpectrumOptions& options) {
  if (options.k_max == 0) throw DomainError("k_max must be >= 1");
  const auto law = PrefactorLaw::from_potential(pot);

  SpectrumAtScale out;
  out.h = h;
  out.flux = flux_at_scale(gauge, h);

  // m~ = (m - p) - c0/h is closest to the minimizer of f at this offset.
  const auto offset = static_cast<std::int64_t>(std::llround(f_minimizer(law) + gauge.c0 / h));
  const std::int64_t center = gauge.p + offset;

  // Fibers are kept keyed by m so the merge order never depends on scheduling.
  std::map<std::int64_t, FiberRecord> solved;
  auto solve_range = [&](std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> todo;
    for (std::int64_t m = lo; m <= hi; ++m) {
      if (!solved.count(m)) todo.push_back(m);
    }
    std::vector<FiberRecord> records(todo.size());
    FiberSolveOptions fopts{options.rel_tol, options.diagnostics};
    parallel_for(todo.size(), options.threads, [&](std::size_t i) {
      const double m_tilde = real_momentum(todo[i], gauge, h);
      const FiberProblem prob(pot, field, h, m_tilde, options.n_grid, options.formulation);
      records[i] = FiberRecord{todo[i], m_tilde, solve_fiber(prob, fopts)};
    });
    for (auto& rec : records) solved.emplace(rec.m, std::move(rec));
  };

  std::int64_t half = options.window.initial_half_width;
  for (;;) {
    solve_range(center - half, center + half);

    std::vector<SpectralEntry> entries;
    entries.reserve(2 * solved.size());
    for (const auto& [m, rec] : solved) {
      entries.push_back({LogScaled{rec.spectrum.log_scale, rec.spectrum.prefactor1}, m, rec.m_tilde, 1});
      entries.push_back({LogScaled{rec.spectrum.log_scale, rec.spectrum.prefactor2}, m, rec.m_tilde, 2});
    }
    std::sort(entries.begin(), entries.end(), entry_less);
    if (entries.size() < options.k_max) throw DomainError("k_max exceeds the number of computed eigenvalues");

    const double kth = entries[options.k_max - 1].value.mantissa;
    const double edge = std::min(solved.at(center - half).spectrum.prefactor1,
                                 solved.at(center + half).spectrum.prefactor1);
    if (edge >= options.window.stop_factor * kth) {
      out.window_lo = center - half;
      out.window_hi = center + half;
      out.entries = std::move(entries);
      break;
    }
    if (2 * half > options.window.max_half_width) {
      std::ostringstream msg;
      msg << "angular-momentum window exceeded +/-" << options.window.max_half_width << " around m=" << center
          << " at h=" << h << " without the edge fibers dominating; the fiber prefactors are not coercive";
      throw CoercivityError(msg.str());
    }
    half *= 2;
  }

  for (auto& [m, rec] : solved) out.fibers.push_back(std::move(rec));

  const double gap = 2.0 * h * pot.features().b0 * 0.99;
  for (const auto& rec : out.fibers) {
    if (rec.spectrum.lambda2 < gap) {
      std::ostringstream msg;
      msg << "second eigenvalue of fiber m=" << rec.m << " at h=" << h << " is " << rec.spectrum.lambda2
          << ", below the gap bound 2hB0 = " << 2.0 * h * pot.features().b0;
      throw NumericalGuardError(msg.str());
    }
  }

  out.predicted = alpha_k(law, out.flux.gamma_frac, options.k_max);
  out.ratio.resize(options.k_max);
  for (std::size_t k = 0; k < options.k_max; ++k) {
    // Numeric and predicted share the same log scale at fixed h.
    out.ratio[k] = out.entries[k].value.mantissa / out.predicted.values[k];
  }
  return out;
}

AssembledSpectrum assemble(const ScalarPotential& pot, const RadialField& field, const GaugeData& gauge,
                           const std::vector<double>& h_list, const SpectrumOptions& options) {
  validate_h_list(h_list);
  AssembledSpectrum out;
  out.features = pot.features();
  out.gauge = gauge;
  out.law = PrefactorLaw::from_potential(pot);
  for (double h : h_list) out.scales.push_back(assemble_at_scale(pot, field, gauge, h, options));
  return out;
}

AssembledSpectrum assemble(const SpectrumRequest& req) {
  validate_h_list(req.h_list);
  const auto pot = solve_scalar_potential(req.geom, req.field, req.options.n_grid);
  const double circ = req.circ_int_A.value_or(potential_gauge_circulation(pot));
  const auto gauge = make_gauge(pot, circ, req.p);
  return assemble(pot, req.field, gauge, req.h_list, req.options);
}

std::vector<AbSweepRow> ab_sweep(const ScalarPotential& pot, const RadialField& field, const GaugeData& gauge,
                                 const std::vector<double>& h_list, SpectrumOptions options) {
  options.k_max = 1;
  std::vector<AbSweepRow> rows;
  for (double h : h_list) {
    const auto scale = assemble_at_scale(pot, field, gauge, h, options);
    const auto& first = scale.entries.front();
    AbSweepRow row;
    row.h = h;
    row.c0_over_h = gauge.c0 / h;
    row.gamma_frac = scale.flux.gamma_frac;
    row.numeric_prefactor = first.value.mantissa;
    row.predicted_alpha1 = scale.predicted.value;
    row.realizing_m = first.m - gauge.p - scale.flux.floor_c0_over_h;
    row.m_tilde = first.m_tilde;
    rows.push_back(row);
  }
  return rows;
}

ConvergenceStudy convergence_study(const AssembledSpectrum& spectrum) {
  if (spectrum.scales.size() < 3) throw DomainError("convergence study needs at least 3 values of h");
  const std::size_t kmax = spectrum.scales.front().ratio.size();
  ConvergenceStudy study;
  study.monotone.assign(kmax, true);
  for (std::size_t i = 0; i < spectrum.scales.size(); ++i) {
    const auto& s = spectrum.scales[i];
    ConvergenceRow row;
    row.h = s.h;
    row.ratio = s.ratio;
    row.diff.assign(kmax, std::numeric_limits<double>::quiet_NaN());
    row.approaching.assign(kmax, true);
    if (i > 0) {
      const auto& prev = spectrum.scales[i - 1].ratio;
      for (std::size_t k = 0; k < kmax; ++k) {
        row.diff[k] = s.ratio[k] - prev[k];
        row.approaching[k] = std::abs(s.ratio[k] - 1.0) < std::abs(prev[k] - 1.0);
        if (!row.approaching[k]) study.monotone[k] = false;
      }
    }
    study.rows.push_back(std::move(row));
  }
  return study;
}

ConvergenceStudy convergence_study(const SpectrumRequest& req) {
  if (req.h_list.size() < 3) throw DomainError("convergence study needs at least 3 values of h");
  return convergence_study(assemble(req));
}

}  // namespace pauli_annulus
