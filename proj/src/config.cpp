#include "pauli_annulus/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pauli_annulus/errors.hpp"

namespace pauli_annulus {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw ConfigError(exit_code::invalid_config, path + ": " + what);
}

std::string describe(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!keys.count(it.key())) {
      std::string list;
      for (const auto* k : allowed) list += (list.empty() ? "" : ", ") + std::string(k);
      invalid(path.empty() ? it.key() : path + "." + it.key(), "unknown key (allowed: " + list + ")");
    }
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(path, "must be finite");
  return v;
}

std::int64_t get_integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  }
  invalid(path, "expected an integer");
}

std::size_t get_count(const json& j, const std::string& path, std::int64_t min_value) {
  const auto v = get_integer(j, path);
  if (v < min_value) invalid(path, "must be >= " + std::to_string(min_value) + " (got " + std::to_string(v) + ")");
  return static_cast<std::size_t>(v);
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) invalid(path, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) invalid(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

double positive(double v, const std::string& path) {
  if (!(v > 0.0)) invalid(path, "must be positive (got " + describe(v) + ")");
  return v;
}

AnnulusGeometry parse_geometry(const json& j) {
  require_object(j, "geometry");
  reject_unknown(j, "geometry", {"rho1", "rho2"});
  if (!j.contains("rho1")) invalid("geometry.rho1", "required");
  if (!j.contains("rho2")) invalid("geometry.rho2", "required");
  const double r1 = get_number(j["rho1"], "geometry.rho1");
  const double r2 = get_number(j["rho2"], "geometry.rho2");
  if (!(r1 > 0.0)) invalid("geometry.rho1", "inner radius must be positive (got " + describe(r1) + ")");
  if (!(r1 < r2)) {
    invalid("geometry.rho1", "inner radius must be smaller than geometry.rho2 (got rho1 = " + describe(r1) +
                                  ", rho2 = " + describe(r2) + ")");
  }
  return AnnulusGeometry(r1, r2);
}

FieldConfig parse_field(const json& j, const AnnulusGeometry& geom) {
  require_object(j, "field");
  if (!j.contains("kind")) invalid("field.kind", "required (constant, polynomial or table)");
  const auto kind = get_string(j["kind"], "field.kind");
  FieldConfig out;
  if (kind == "constant") {
    reject_unknown(j, "field", {"kind", "value"});
    out.kind = FieldKind::constant;
    if (!j.contains("value")) invalid("field.value", "required for a constant field");
    out.value = get_number(j["value"], "field.value");
    if (!(out.value > 0.0)) {
      invalid("field.value", "the magnetic field must be radial and strictly positive (got " + describe(out.value) + ")");
    }
  } else if (kind == "polynomial") {
    reject_unknown(j, "field", {"kind", "coefficients"});
    out.kind = FieldKind::polynomial;
    if (!j.contains("coefficients")) invalid("field.coefficients", "required for a polynomial field");
    out.coefficients = get_numbers(j["coefficients"], "field.coefficients");
    if (out.coefficients.empty()) invalid("field.coefficients", "must not be empty");
  } else if (kind == "table") {
    reject_unknown(j, "field", {"kind", "r", "B"});
    out.kind = FieldKind::table;
    if (!j.contains("r")) invalid("field.r", "required for a table field");
    if (!j.contains("B")) invalid("field.B", "required for a table field");
    out.table_r = get_numbers(j["r"], "field.r");
    out.table_b = get_numbers(j["B"], "field.B");
    if (out.table_r.size() != out.table_b.size()) invalid("field.B", "must have the same length as field.r");
    if (out.table_r.size() < 4) invalid("field.r", "a table needs at least 4 points");
    for (std::size_t i = 0; i < out.table_b.size(); ++i) {
      if (!(out.table_b[i] > 0.0)) {
        invalid("field.B[" + std::to_string(i) + "]",
                "the magnetic field must be radial and strictly positive (got " + describe(out.table_b[i]) + ")");
      }
    }
    for (std::size_t i = 1; i < out.table_r.size(); ++i) {
      if (!(out.table_r[i] > out.table_r[i - 1])) {
        invalid("field.r[" + std::to_string(i) + "]", "radii must be strictly increasing");
      }
    }
    if (out.table_r.front() > geom.rho1 || out.table_r.back() < geom.rho2) {
      invalid("field.r", "table must cover [geometry.rho1, geometry.rho2]");
    }
  } else {
    invalid("field.kind", "unknown kind '" + kind + "' (constant, polynomial or table)");
  }
  return out;
}

GaugeConfig parse_gauge(const json& j) {
  require_object(j, "gauge");
  reject_unknown(j, "gauge", {"circulation", "symmetric_gauge", "p"});
  GaugeConfig out;
  if (j.contains("circulation")) out.circulation = get_number(j["circulation"], "gauge.circulation");
  if (j.contains("symmetric_gauge")) out.symmetric_gauge = get_bool(j["symmetric_gauge"], "gauge.symmetric_gauge");
  if (out.circulation && out.symmetric_gauge) {
    invalid("gauge.symmetric_gauge", "cannot be combined with gauge.circulation");
  }
  if (j.contains("p")) out.p = get_integer(j["p"], "gauge.p");
  return out;
}

NumericsConfig parse_numerics(const json& j) {
  require_object(j, "numerics");
  reject_unknown(j, "numerics", {"n_grid", "eig_tol", "m_window", "formulation"});
  NumericsConfig out;
  if (j.contains("n_grid")) {
    out.n_grid = get_count(j["n_grid"], "numerics.n_grid", static_cast<std::int64_t>(FiberProblem::kMinGrid));
  }
  if (j.contains("eig_tol")) {
    out.eig_tol = get_number(j["eig_tol"], "numerics.eig_tol");
    if (!(out.eig_tol >= 1e-15 && out.eig_tol <= 1e-3)) invalid("numerics.eig_tol", "must lie in [1e-15, 1e-3]");
  }
  if (j.contains("m_window")) {
    const auto& w = j["m_window"];
    require_object(w, "numerics.m_window");
    reject_unknown(w, "numerics.m_window", {"initial_half_width", "max_half_width", "stop_factor"});
    if (w.contains("initial_half_width")) {
      out.window.initial_half_width =
          static_cast<std::int64_t>(get_count(w["initial_half_width"], "numerics.m_window.initial_half_width", 1));
    }
    if (w.contains("max_half_width")) {
      out.window.max_half_width =
          static_cast<std::int64_t>(get_count(w["max_half_width"], "numerics.m_window.max_half_width", 1));
    }
    if (w.contains("stop_factor")) {
      out.window.stop_factor = get_number(w["stop_factor"], "numerics.m_window.stop_factor");
      if (!(out.window.stop_factor > 1.0)) invalid("numerics.m_window.stop_factor", "must be > 1");
    }
    if (out.window.max_half_width < out.window.initial_half_width) {
      invalid("numerics.m_window.max_half_width", "must be >= numerics.m_window.initial_half_width");
    }
  }
  if (j.contains("formulation")) {
    const auto name = get_string(j["formulation"], "numerics.formulation");
    try {
      out.formulation = formulation_from_string(name);
    } catch (const DomainError&) {
      invalid("numerics.formulation", "unknown formulation '" + name + "' (direct or weighted)");
    }
  }
  return out;
}

ExperimentConfig parse_experiment(const json& j) {
  require_object(j, "experiment");
  reject_unknown(j, "experiment", {"h", "h_list", "h_range", "k_max", "m", "m_tilde", "spin", "eps_exponent"});
  ExperimentConfig out;
  if (j.contains("h")) out.h = positive(get_number(j["h"], "experiment.h"), "experiment.h");
  if (j.contains("h_list")) {
    out.h_list = get_numbers(j["h_list"], "experiment.h_list");
    if (out.h_list.empty()) invalid("experiment.h_list", "must not be empty");
    for (std::size_t i = 0; i < out.h_list.size(); ++i) {
      const auto path = "experiment.h_list[" + std::to_string(i) + "]";
      positive(out.h_list[i], path);
      if (i > 0 && !(out.h_list[i] < out.h_list[i - 1])) invalid(path, "h values must be strictly descending");
    }
  }
  if (j.contains("h_range")) {
    const auto& r = j["h_range"];
    require_object(r, "experiment.h_range");
    reject_unknown(r, "experiment.h_range", {"min", "max", "count"});
    for (const char* key : {"min", "max", "count"}) {
      if (!r.contains(key)) invalid(std::string("experiment.h_range.") + key, "required");
    }
    HRange range;
    range.min = positive(get_number(r["min"], "experiment.h_range.min"), "experiment.h_range.min");
    range.max = get_number(r["max"], "experiment.h_range.max");
    range.count = get_count(r["count"], "experiment.h_range.count", 2);
    if (!(range.max > range.min)) invalid("experiment.h_range.max", "must exceed experiment.h_range.min");
    if (!out.h_list.empty()) invalid("experiment.h_range", "cannot be combined with experiment.h_list");
    out.h_range = range;
  }
  if (j.contains("k_max")) out.k_max = get_count(j["k_max"], "experiment.k_max", 1);
  if (j.contains("m")) out.m = get_integer(j["m"], "experiment.m");
  if (j.contains("m_tilde")) out.m_tilde = get_number(j["m_tilde"], "experiment.m_tilde");
  if (out.m && out.m_tilde) invalid("experiment.m_tilde", "cannot be combined with experiment.m");
  if (j.contains("spin")) {
    const auto s = get_string(j["spin"], "experiment.spin");
    if (s == "minus") {
      out.spin = SpinBlock::minus;
    } else if (s == "plus") {
      out.spin = SpinBlock::plus;
    } else {
      invalid("experiment.spin", "unknown spin block '" + s + "' (minus or plus)");
    }
  }
  if (j.contains("eps_exponent")) {
    out.eps_exponent = get_number(j["eps_exponent"], "experiment.eps_exponent");
    if (!(out.eps_exponent > 0.5 && out.eps_exponent < 1.0)) invalid("experiment.eps_exponent", "must lie in (0.5, 1)");
  }
  return out;
}

OutputConfig parse_output(const json& j) {
  require_object(j, "output");
  reject_unknown(j, "output", {"directory", "formats"});
  OutputConfig out;
  if (j.contains("directory")) out.directory = get_string(j["directory"], "output.directory");
  if (j.contains("formats")) {
    const auto& f = j["formats"];
    if (!f.is_array()) invalid("output.formats", "expected an array of strings");
    out.csv = false;
    out.json = false;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto path = "output.formats[" + std::to_string(i) + "]";
      const auto name = get_string(f[i], path);
      if (name == "csv") {
        out.csv = true;
      } else if (name == "json") {
        out.json = true;
      } else {
        invalid(path, "unknown format '" + name + "' (csv or json)");
      }
    }
  }
  return out;
}

}  // namespace

RadialField RunConfig::make_field() const {
  switch (field.kind) {
    case FieldKind::constant:
      return RadialField::constant(geometry, field.value);
    case FieldKind::polynomial:
      return RadialField::polynomial(geometry, field.coefficients);
    case FieldKind::table:
      return RadialField::table(geometry, field.table_r, field.table_b);
  }
  throw InternalError("unhandled field kind");
}

std::vector<double> RunConfig::resolved_h_list() const {
  if (!experiment.h_list.empty()) return experiment.h_list;
  if (experiment.h_range) {
    const auto& r = *experiment.h_range;
    const double lo = 1.0 / r.max;
    const double hi = 1.0 / r.min;
    std::vector<double> out(r.count);
    const double n = static_cast<double>(r.count - 1);
    for (std::size_t i = 0; i < r.count; ++i) {
      const double t = static_cast<double>(i) / n;
      out[i] = 1.0 / (lo + t * (hi - lo));
    }
    out.front() = r.max;
    out.back() = r.min;
    return out;
  }
  if (experiment.h) return {*experiment.h};
  return {};
}

std::optional<double> RunConfig::circulation() const {
  if (gauge.circulation) return gauge.circulation;
  if (gauge.symmetric_gauge) return make_field().hole_flux();
  return std::nullopt;
}

RunConfig parse_config_text(std::string_view text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << origin << ":" << line << ":" << column << ": malformed JSON: " << e.what();
    throw ConfigError(exit_code::malformed_json, msg.str());
  }

  try {
    if (!root.is_object()) invalid("(root)", "expected a JSON object");
    reject_unknown(root, "", {"geometry", "field", "gauge", "numerics", "experiment", "output"});
    if (!root.contains("geometry")) invalid("geometry", "required");
    if (!root.contains("field")) invalid("field", "required");

    RunConfig cfg;
    cfg.geometry = parse_geometry(root["geometry"]);
    cfg.field = parse_field(root["field"], cfg.geometry);
    if (root.contains("gauge")) cfg.gauge = parse_gauge(root["gauge"]);
    if (root.contains("numerics")) cfg.numerics = parse_numerics(root["numerics"]);
    if (root.contains("experiment")) cfg.experiment = parse_experiment(root["experiment"]);
    if (root.contains("output")) cfg.output = parse_output(root["output"]);

    try {
      (void)cfg.make_field();
    } catch (const DomainError& e) {
      invalid("field", e.what());
    }
    if (cfg.gauge.symmetric_gauge && cfg.field.kind == FieldKind::table) {
      invalid("gauge.symmetric_gauge",
              "needs a field with a closed-form extension into the hole (constant or polynomial); "
              "give gauge.circulation instead");
    }
    return cfg;
  } catch (const ConfigError& e) {
    throw ConfigError(e.code(), origin + ": " + e.what());
  }
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ConfigError(exit_code::missing_file, "config file not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(exit_code::missing_file, "cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace pauli_annulus
