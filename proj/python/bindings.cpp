#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "pauli_annulus/asymptotics.hpp"
#include "pauli_annulus/commands.hpp"
#include "pauli_annulus/config.hpp"
#include "pauli_annulus/errors.hpp"
#include "pauli_annulus/fiber_solver.hpp"
#include "pauli_annulus/gauge.hpp"
#include "pauli_annulus/radial_field.hpp"
#include "pauli_annulus/spectrum.hpp"
#include "pauli_annulus/tridiagonal.hpp"
#include "pauli_annulus/version.hpp"

namespace py = pybind11;
using namespace pauli_annulus;

namespace {

py::array_t<double> to_array(std::span<const double> values) {
  py::array_t<double> out(static_cast<py::ssize_t>(values.size()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

Formulation parse_formulation(const std::string& name) { return formulation_from_string(name); }

SpinBlock parse_spin(const std::string& name) {
  if (name == "minus") return SpinBlock::minus;
  if (name == "plus") return SpinBlock::plus;
  throw DomainError("unknown spin block '" + name + "' (minus or plus)");
}

SpectrumOptions make_options(std::size_t k_max, std::size_t n_grid, const std::string& formulation, unsigned threads,
                             double rel_tol) {
  SpectrumOptions o;
  o.k_max = k_max;
  o.n_grid = n_grid;
  o.formulation = parse_formulation(formulation);
  o.threads = threads;
  o.rel_tol = rel_tol;
  return o;
}

py::dict scale_to_dict(const SpectrumAtScale& s) {
  py::list entries;
  for (const auto& e : s.entries) {
    py::dict d;
    d["m"] = e.m;
    d["m_tilde"] = e.m_tilde;
    d["j"] = e.j;
    d["log_scale"] = e.value.log_scale;
    d["mantissa"] = e.value.mantissa;
    entries.append(d);
  }
  py::dict out;
  out["h"] = s.h;
  out["gamma_frac"] = s.flux.gamma_frac;
  out["window"] = py::make_tuple(s.window_lo, s.window_hi);
  out["entries"] = entries;
  out["predicted"] = s.predicted.values;
  out["realizing"] = s.predicted.realizing;
  out["ratio"] = s.ratio;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Low-lying Dirichlet-Pauli spectrum on a radial annulus";
  m.attr("__version__") = kSoftwareVersion;

  static py::exception<NumericalGuardError> guard_exc(m, "NumericalGuardError", PyExc_RuntimeError);
  static py::exception<ConfigError> config_exc(m, "ConfigError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NumericalGuardError& e) {
      py::set_error(guard_exc, e.what());
    } catch (const ConfigError& e) {
      py::set_error(config_exc, e.what());
    }
  });

  py::class_<AnnulusGeometry>(m, "AnnulusGeometry")
      .def(py::init<double, double>(), py::arg("rho1"), py::arg("rho2"))
      .def_readonly("rho1", &AnnulusGeometry::rho1)
      .def_readonly("rho2", &AnnulusGeometry::rho2)
      .def_property_readonly("width", &AnnulusGeometry::width)
      .def("__repr__", [](const AnnulusGeometry& g) {
        std::ostringstream s;
        s << "AnnulusGeometry(rho1=" << g.rho1 << ", rho2=" << g.rho2 << ")";
        return s.str();
      });

  py::class_<RadialField>(m, "RadialField")
      .def_static("constant", &RadialField::constant, py::arg("geometry"), py::arg("value"))
      .def_static("polynomial", &RadialField::polynomial, py::arg("geometry"), py::arg("coefficients"))
      .def_static("table", &RadialField::table, py::arg("geometry"), py::arg("r"), py::arg("B"))
      .def("__call__", &RadialField::operator(), py::arg("r"))
      .def_property_readonly("kind", [](const RadialField& f) { return to_string(f.kind()); })
      .def_property_readonly("b0", &RadialField::b0)
      .def("hole_flux", &RadialField::hole_flux);

  py::class_<PotentialFeatures>(m, "PotentialFeatures")
      .def_readonly("phi_min", &PotentialFeatures::phi_min)
      .def_readonly("r_min", &PotentialFeatures::r_min)
      .def_readonly("curvature", &PotentialFeatures::curvature)
      .def_readonly("curvature_from_phi", &PotentialFeatures::curvature_from_phi)
      .def_readonly("dn_inner", &PotentialFeatures::dn_phi_inner)
      .def_readonly("dn_outer", &PotentialFeatures::dn_phi_outer)
      .def_readonly("b0", &PotentialFeatures::b0);

  py::class_<ScalarPotential>(m, "ScalarPotential")
      .def_property_readonly("geometry", &ScalarPotential::geometry)
      .def_property_readonly("r", [](const ScalarPotential& p) { return to_array(p.grid()); })
      .def_property_readonly("phi", [](const ScalarPotential& p) { return to_array(p.phi()); })
      .def_property_readonly("dphi", [](const ScalarPotential& p) { return to_array(p.dphi()); })
      .def_property_readonly("features", &ScalarPotential::features)
      .def("phi_at", &ScalarPotential::phi_at, py::arg("r"))
      .def("dphi_at", &ScalarPotential::dphi_at, py::arg("r"));

  m.def("solve_scalar_potential", &solve_scalar_potential, py::arg("geometry"), py::arg("field"),
        py::arg("n_grid") = 4096);

  py::class_<GaugeData>(m, "GaugeData")
      .def_readonly("circulation", &GaugeData::circ_int_A)
      .def_readonly("c0", &GaugeData::c0)
      .def_readonly("p", &GaugeData::p);
  m.def("potential_gauge_circulation", &potential_gauge_circulation, py::arg("potential"));
  m.def("make_gauge", &make_gauge, py::arg("potential"), py::arg("circulation"), py::arg("p") = 0);
  m.def("real_momentum", &real_momentum, py::arg("m"), py::arg("gauge"), py::arg("h"));

  m.def(
      "smallest_eigenvalues",
      [](std::vector<double> diag, std::vector<double> offdiag, std::size_t k, double rel_tol) {
        return smallest_eigenvalues(TridiagonalSym(std::move(diag), std::move(offdiag)), k, rel_tol);
      },
      py::arg("diag"), py::arg("offdiag"), py::arg("k"), py::arg("rel_tol") = 1e-12);

  py::class_<FiberSpectrum>(m, "FiberSpectrum")
      .def_readonly("lambda1", &FiberSpectrum::lambda1)
      .def_readonly("lambda2", &FiberSpectrum::lambda2)
      .def_readonly("log_scale", &FiberSpectrum::log_scale)
      .def_readonly("prefactor1", &FiberSpectrum::prefactor1)
      .def_readonly("prefactor2", &FiberSpectrum::prefactor2)
      .def_readonly("kernel_residual", &FiberSpectrum::kernel_residual)
      .def_readonly("upper_bound", &FiberSpectrum::upper_bound)
      .def_readonly("upper_bound_prefactor", &FiberSpectrum::upper_bound_prefactor);

  m.def(
      "fiber_eigenvalues",
      [](const ScalarPotential& pot, const RadialField& field, double h, double m_tilde, std::size_t k,
         std::size_t n_grid, const std::string& formulation, const std::string& spin) {
        const FiberProblem prob(pot, field, h, m_tilde, n_grid, parse_formulation(formulation), parse_spin(spin));
        return fiber_eigenvalues(prob, k);
      },
      py::arg("potential"), py::arg("field"), py::arg("h"), py::arg("m_tilde"), py::arg("k") = 2,
      py::arg("n_grid") = 4096, py::arg("formulation") = "weighted", py::arg("spin") = "minus");

  m.def(
      "solve_fiber",
      [](const ScalarPotential& pot, const RadialField& field, double h, double m_tilde, std::size_t n_grid,
         const std::string& formulation) {
        const FiberProblem prob(pot, field, h, m_tilde, n_grid, parse_formulation(formulation));
        return solve_fiber(prob);
      },
      py::arg("potential"), py::arg("field"), py::arg("h"), py::arg("m_tilde"), py::arg("n_grid") = 4096,
      py::arg("formulation") = "weighted");

  py::class_<PrefactorLaw>(m, "PrefactorLaw")
      .def_static("from_potential", &PrefactorLaw::from_potential, py::arg("potential"))
      .def_static("from_parameters", &PrefactorLaw::from_parameters, py::arg("curvature"), py::arg("dn_inner"),
                  py::arg("dn_outer"), py::arg("q_inner"), py::arg("q_outer"))
      .def_readonly("curvature", &PrefactorLaw::curvature)
      .def_readonly("dn_inner", &PrefactorLaw::dn_inner)
      .def_readonly("dn_outer", &PrefactorLaw::dn_outer)
      .def_readonly("q_inner", &PrefactorLaw::q_inner)
      .def_readonly("q_outer", &PrefactorLaw::q_outer)
      .def("lower_bound", &PrefactorLaw::lower_bound);
  m.def("f_eval", &f_eval, py::arg("law"), py::arg("x"));
  m.def("f_minimizer", &f_minimizer, py::arg("law"));
  m.def(
      "alpha_k",
      [](const PrefactorLaw& law, double gamma, std::size_t k) {
        const auto a = alpha_k(law, gamma, k);
        return py::make_tuple(a.value, a.realizing, a.values);
      },
      py::arg("law"), py::arg("gamma"), py::arg("k"));

  m.def(
      "assemble",
      [](const ScalarPotential& pot, const RadialField& field, const GaugeData& gauge, const std::vector<double>& h_list,
         std::size_t k_max, std::size_t n_grid, const std::string& formulation, unsigned threads, double rel_tol) {
        const auto options = make_options(k_max, n_grid, formulation, threads, rel_tol);
        AssembledSpectrum spec;
        {
          py::gil_scoped_release release;
          spec = assemble(pot, field, gauge, h_list, options);
        }
        py::list out;
        for (const auto& s : spec.scales) out.append(scale_to_dict(s));
        return out;
      },
      py::arg("potential"), py::arg("field"), py::arg("gauge"), py::arg("h_list"), py::arg("k_max") = 2,
      py::arg("n_grid") = 4096, py::arg("formulation") = "weighted", py::arg("threads") = 1,
      py::arg("rel_tol") = 1e-12);

  m.def(
      "ab_sweep",
      [](const ScalarPotential& pot, const RadialField& field, const GaugeData& gauge, const std::vector<double>& h_list,
         std::size_t n_grid, unsigned threads) {
        const auto rows = ab_sweep(pot, field, gauge, h_list, make_options(1, n_grid, "weighted", threads, 1e-12));
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["h"] = r.h;
          d["c0_over_h"] = r.c0_over_h;
          d["gamma_frac"] = r.gamma_frac;
          d["numeric_prefactor"] = r.numeric_prefactor;
          d["predicted_alpha1"] = r.predicted_alpha1;
          d["realizing_m"] = r.realizing_m;
          d["m_tilde"] = r.m_tilde;
          out.append(d);
        }
        return out;
      },
      py::arg("potential"), py::arg("field"), py::arg("gauge"), py::arg("h_list"), py::arg("n_grid") = 4096,
      py::arg("threads") = 1);

  m.def(
      "convergence_study",
      [](const ScalarPotential& pot, const RadialField& field, const GaugeData& gauge, const std::vector<double>& h_list,
         std::size_t k_max, std::size_t n_grid, unsigned threads) {
        const auto spec = assemble(pot, field, gauge, h_list, make_options(k_max, n_grid, "weighted", threads, 1e-12));
        const auto study = convergence_study(spec);
        py::list rows;
        for (const auto& r : study.rows) rows.append(py::make_tuple(r.h, r.ratio));
        return py::make_tuple(rows, std::vector<bool>(study.monotone.begin(), study.monotone.end()));
      },
      py::arg("potential"), py::arg("field"), py::arg("gauge"), py::arg("h_list"), py::arg("k_max") = 2,
      py::arg("n_grid") = 4096, py::arg("threads") = 1);

  m.def(
      "run_cli",
      [](const std::string& command, const std::filesystem::path& config, std::optional<std::filesystem::path> out,
         unsigned threads) {
        std::ostringstream err;
        int code = 0;
        py::gil_scoped_release release;
        try {
          const auto cfg = parse_config(config);
          RunOptions options;
          options.out_dir = std::move(out);
          options.threads = threads;
          code = run(command, cfg, options, err);
        } catch (...) {
          code = exit_code_for_current_exception(err);
        }
        py::gil_scoped_acquire acquire;
        return py::make_tuple(code, err.str());
      },
      py::arg("command"), py::arg("config"), py::arg("out") = std::nullopt, py::arg("threads") = 1);
}
