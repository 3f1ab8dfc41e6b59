#include <string>

#include "doctest.h"
#include "pauli_annulus/config.hpp"

using namespace pauli_annulus;

namespace {

int code_of(const std::string& text) {
  try {
    (void)parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.code();
  }
  return 0;
}

std::string message_of(const std::string& text) {
  try {
    (void)parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const std::string kField = R"("field": {"kind": "constant", "value": 1.0})";
const std::string kGeom = R"("geometry": {"rho1": 1.0, "rho2": 2.0})";

std::string with(const std::string& extra) { return "{" + kGeom + ", " + kField + (extra.empty() ? "" : ", " + extra) + "}"; }

}  // namespace

TEST_CASE("minimal config gets documented defaults") {
  const auto cfg = parse_config_text(with(""));
  CHECK(cfg.geometry.rho1 == 1.0);
  CHECK(cfg.geometry.rho2 == 2.0);
  CHECK(cfg.numerics.n_grid == 4096);
  CHECK(cfg.numerics.eig_tol == 1e-12);
  CHECK(cfg.gauge.p == 0);
  CHECK_FALSE(cfg.gauge.circulation.has_value());
  CHECK_FALSE(cfg.circulation().has_value());
  CHECK(cfg.numerics.formulation == Formulation::weighted);
  CHECK(cfg.numerics.window.initial_half_width == 8);
  CHECK(cfg.numerics.window.max_half_width == 64);
  CHECK(cfg.numerics.window.stop_factor == 4.0);
  CHECK(cfg.experiment.k_max == 2);
  CHECK(cfg.output.csv);
  CHECK(cfg.output.json);
}

TEST_CASE("inverted radii name the offending key") {
  const std::string text = R"({"geometry": {"rho1": 2.0, "rho2": 1.0}, )" + kField + "}";
  CHECK(code_of(text) == exit_code::invalid_config);
  CHECK(message_of(text).find("geometry.rho1") != std::string::npos);
}

TEST_CASE("non-positive table entries are rejected") {
  const std::string text = "{" + kGeom +
                           R"(, "field": {"kind": "table", "r": [1, 1.25, 1.5, 1.75, 2], "B": [1, 1, 0, 1, 1]}})";
  CHECK(code_of(text) == exit_code::invalid_config);
  const auto msg = message_of(text);
  CHECK(msg.find("field.B[2]") != std::string::npos);
  CHECK(msg.find("strictly positive") != std::string::npos);
}

TEST_CASE("malformed JSON reports a position") {
  CHECK(code_of("{\"geometry\": {\"rho1\": 1,\n \"rho2\": }}") == exit_code::malformed_json);
  CHECK(message_of("{\"geometry\": {\"rho1\": 1,\n \"rho2\": }}").find(":2:") != std::string::npos);
  CHECK(code_of("") == exit_code::malformed_json);
}

TEST_CASE("strict keys") {
  CHECK(code_of(with(R"("numerics": {"ngrid": 512})")) == exit_code::invalid_config);
  CHECK(message_of(with(R"("numerics": {"ngrid": 512})")).find("numerics.ngrid") != std::string::npos);
  CHECK(code_of(with(R"("extra": 1)")) == exit_code::invalid_config);
  CHECK(code_of("{" + kGeom + R"(, "field": {"kind": "constant", "value": 1, "B": [1]}})") ==
        exit_code::invalid_config);
}

TEST_CASE("value constraints") {
  CHECK(code_of(with(R"("numerics": {"n_grid": 16})")) == exit_code::invalid_config);
  CHECK(code_of(with(R"("numerics": {"n_grid": 1024.5})")) == exit_code::invalid_config);
  CHECK(code_of(with(R"("numerics": {"formulation": "dense"})")) == exit_code::invalid_config);
  CHECK(code_of(with(R"("experiment": {"h": -0.1})")) == exit_code::invalid_config);
  CHECK(code_of(with(R"("experiment": {"h_list": [0.1, 0.2]})")) == exit_code::invalid_config);
  CHECK(code_of(with(R"("experiment": {"k_max": 0})")) == exit_code::invalid_config);
  CHECK(code_of(with(R"("experiment": {"spin": "up"})")) == exit_code::invalid_config);
  CHECK(code_of(with(R"("experiment": {"m": 1, "m_tilde": 0.5})")) == exit_code::invalid_config);
  CHECK(code_of(with(R"("gauge": {"circulation": 1.0, "symmetric_gauge": true})")) == exit_code::invalid_config);
  CHECK(code_of(with(R"("output": {"formats": ["xml"]})")) == exit_code::invalid_config);
  CHECK(code_of(with(R"("numerics": {"m_window": {"initial_half_width": 10, "max_half_width": 4}})")) ==
        exit_code::invalid_config);
  CHECK(code_of("{" + kGeom + R"(, "field": {"kind": "polynomial", "coefficients": [1.0, -1.0]}})") ==
        exit_code::invalid_config);
}

TEST_CASE("symmetric gauge needs a field extension") {
  const std::string table = "{" + kGeom +
                            R"(, "field": {"kind": "table", "r": [1, 1.25, 1.5, 1.75, 2], "B": [1, 1, 1, 1, 1]},)"
                            R"( "gauge": {"symmetric_gauge": true}})";
  CHECK(code_of(table) == exit_code::invalid_config);
  const auto cfg = parse_config_text(with(R"("gauge": {"symmetric_gauge": true, "p": -2})"));
  REQUIRE(cfg.circulation().has_value());
  CHECK(*cfg.circulation() == doctest::Approx(3.141592653589793));
  CHECK(cfg.gauge.p == -2);
}

TEST_CASE("h range expands uniformly in 1/h") {
  const auto cfg = parse_config_text(with(R"("experiment": {"h_range": {"min": 0.1, "max": 0.2, "count": 3}})"));
  const auto list = cfg.resolved_h_list();
  REQUIRE(list.size() == 3);
  CHECK(list[0] == 0.2);
  CHECK(list[1] == doctest::Approx(1.0 / 7.5));
  CHECK(list[2] == 0.1);
}

TEST_CASE("missing file") {
  try {
    (void)parse_config("/nonexistent/config.json");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.code() == exit_code::missing_file);
  }
}
