#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pauli_annulus/asymptotics.hpp"
#include "pauli_annulus/fiber_solver.hpp"
#include "pauli_annulus/gauge.hpp"
#include "pauli_annulus/radial_field.hpp"

namespace pauli_annulus {

/// How the angular-momentum window grows: start at center +/- initial,
/// double until both edge fibers' lambda_1 exceed stop_factor times the
/// k_max-th smallest eigenvalue found so far.
struct WindowPolicy {
  std::int64_t initial_half_width = 8;
  std::int64_t max_half_width = 64;
  double stop_factor = 4.0;
};

struct SpectrumOptions {
  std::size_t k_max = 2;
  std::size_t n_grid = 4096;
  WindowPolicy window;
  Formulation formulation = Formulation::weighted;
  double rel_tol = 1e-12;
  unsigned threads = 1;
  /// Kernel residual and trial-function bound for every fiber.
  bool diagnostics = true;
};

struct SpectrumRequest {
  AnnulusGeometry geom;
  RadialField field;
  /// Inner-circle circulation of A; empty means A = grad^perp phi (c0 = 0).
  std::optional<double> circ_int_A;
  std::int64_t p = 0;
  /// Positive and sorted in descending order.
  std::vector<double> h_list;
  SpectrumOptions options;
};

struct FiberRecord {
  std::int64_t m = 0;
  double m_tilde = 0.0;
  FiberSpectrum spectrum;
};

/// One eigenvalue of the minus block: lambda_{j, m~}, j in {1, 2}.
struct SpectralEntry {
  LogScaled value;
  std::int64_t m = 0;
  double m_tilde = 0.0;
  int j = 1;
};

/// Orders by value, then m, then j.
bool entry_less(const SpectralEntry& a, const SpectralEntry& b);

struct SpectrumAtScale {
  double h = 0.0;
  FluxAtScale flux;
  std::int64_t window_lo = 0;
  std::int64_t window_hi = 0;
  /// Every solved fiber, ascending in m.
  std::vector<FiberRecord> fibers;
  /// Union of the per-fiber spectra, ascending.
  std::vector<SpectralEntry> entries;
  /// alpha_1..alpha_kmax with the realizing integers (relative to gamma(h)).
  AlphaResult predicted;
  /// lambda_k(numeric) / (alpha_k sqrt(h) e^{2 phi_min/h}), k = 1..k_max.
  std::vector<double> ratio;
};

struct AssembledSpectrum {
  PotentialFeatures features;
  GaugeData gauge;
  PrefactorLaw law;
  std::vector<SpectrumAtScale> scales;
};

/// Low-lying spectrum of the minus block at one h as the union over fibers.
SpectrumAtScale assemble_at_scale(const ScalarPotential& pot, const RadialField& field, const GaugeData& gauge,
                                  double h, const SpectrumOptions& options);

AssembledSpectrum assemble(const SpectrumRequest& req);
AssembledSpectrum assemble(const ScalarPotential& pot, const RadialField& field, const GaugeData& gauge,
                           const std::vector<double>& h_list, const SpectrumOptions& options);

struct AbSweepRow {
  double h = 0.0;
  double c0_over_h = 0.0;
  double gamma_frac = 0.0;
  /// f_{1,h} at the realizing fiber, i.e. lambda_1 / (sqrt(h) e^{2 phi_min/h}).
  double numeric_prefactor = 0.0;
  double predicted_alpha1 = 0.0;
  /// Realizing m in the gauge where m~ = m - gamma(h).
  std::int64_t realizing_m = 0;
  double m_tilde = 0.0;
};

std::vector<AbSweepRow> ab_sweep(const ScalarPotential& pot, const RadialField& field, const GaugeData& gauge,
                                 const std::vector<double>& h_list, SpectrumOptions options);

struct ConvergenceRow {
  double h = 0.0;
  std::vector<double> ratio;
  /// ratio_k(h_i) - ratio_k(h_{i-1}); NaN on the first row.
  std::vector<double> diff;
  /// |ratio_k - 1| strictly smaller than on the previous row (true on the first row).
  std::vector<bool> approaching;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  /// Per k: whether |ratio_k - 1| decreases strictly along the whole h list.
  std::vector<bool> monotone;
};

ConvergenceStudy convergence_study(const AssembledSpectrum& spectrum);
ConvergenceStudy convergence_study(const SpectrumRequest& req);

/// Checks the h-list invariant (positive, strictly descending).
void validate_h_list(const std::vector<double>& h_list);

}  // namespace pauli_annulus
