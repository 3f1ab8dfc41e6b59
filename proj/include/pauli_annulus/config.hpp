#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pauli_annulus/fiber_solver.hpp"
#include "pauli_annulus/radial_field.hpp"
#include "pauli_annulus/spectrum.hpp"

namespace pauli_annulus {

/// Process exit codes shared by the CLI and the config layer.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int missing_file = 2;
inline constexpr int malformed_json = 3;
inline constexpr int invalid_config = 4;
inline constexpr int numerical_guard = 5;
inline constexpr int internal = 6;
}  // namespace exit_code

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

struct FieldConfig {
  FieldKind kind = FieldKind::constant;
  double value = 1.0;
  std::vector<double> coefficients;
  std::vector<double> table_r;
  std::vector<double> table_b;
};

struct GaugeConfig {
  std::optional<double> circulation;
  bool symmetric_gauge = false;
  std::int64_t p = 0;
};

struct NumericsConfig {
  std::size_t n_grid = 4096;
  double eig_tol = 1e-12;
  WindowPolicy window;
  Formulation formulation = Formulation::weighted;
};

struct HRange {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct ExperimentConfig {
  std::optional<double> h;
  std::vector<double> h_list;
  std::optional<HRange> h_range;
  std::size_t k_max = 2;
  std::optional<std::int64_t> m;
  std::optional<double> m_tilde;
  SpinBlock spin = SpinBlock::minus;
  double eps_exponent = 0.7;
};

struct OutputConfig {
  std::filesystem::path directory = ".";
  bool csv = true;
  bool json = true;
};

struct RunConfig {
  AnnulusGeometry geometry;
  FieldConfig field;
  GaugeConfig gauge;
  NumericsConfig numerics;
  ExperimentConfig experiment;
  OutputConfig output;

  RadialField make_field() const;
  /// h_list if given, else h_range expanded uniformly in 1/h (descending h), else {h}.
  std::vector<double> resolved_h_list() const;
  /// Inner circulation from the gauge block; empty means A = grad^perp phi.
  std::optional<double> circulation() const;
};

/// Reads and validates a JSON run configuration. Unknown keys are rejected.
/// Throws ConfigError with code 2 (missing file), 3 (malformed JSON) or
/// 4 (constraint violation, message names the offending key).
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text, const std::string& origin = "<config>");

}  // namespace pauli_annulus
