// Python bindings for the main operations. Thin wrappers only; all numerics
// live in the C++ core.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "waveop/hilbert.hpp"
#include "waveop/imagtime.hpp"
#include "waveop/model.hpp"
#include "waveop/oracle.hpp"
#include "waveop/oscillator.hpp"
#include "waveop/phasespace.hpp"
#include "waveop/version.hpp"

namespace py = pybind11;

using waveop::model::GridSpec;
using waveop::model::HamiltonianSpec;
using waveop::phasespace::ExpectationRule;
using waveop::phasespace::PhaseSpaceField;

namespace {

const PhaseSpaceField* maybe_ptr(const std::optional<PhaseSpaceField>& f) {
  return f ? &*f : nullptr;
}

}  // namespace

PYBIND11_MODULE(waveop_native, m) {
  m.doc() = "wave-operator dynamics engine";
  m.attr("__version__") = waveop::kVersion;

  py::register_exception<waveop::ConfigError>(m, "ConfigError",
                                              PyExc_ValueError);
  py::register_exception<waveop::NumericalError>(m, "NumericalError",
                                                 PyExc_RuntimeError);

  py::class_<HamiltonianSpec>(m, "HamiltonianSpec")
      .def(py::init<>())
      .def_readwrite("kinetic_coeffs", &HamiltonianSpec::kinetic_coeffs)
      .def_readwrite("potential_coeffs", &HamiltonianSpec::potential_coeffs)
      .def_readwrite("hbar", &HamiltonianSpec::hbar)
      .def_readwrite("label", &HamiltonianSpec::label)
      .def_static("benchmark", &HamiltonianSpec::benchmark, py::arg("n"),
                  py::arg("hbar") = 1.0,
                  "p^2/2 + x^n/2 for n in {2, 4}");

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("x_min", &GridSpec::x_min)
      .def_readwrite("x_max", &GridSpec::x_max)
      .def_readwrite("p_min", &GridSpec::p_min)
      .def_readwrite("p_max", &GridSpec::p_max)
      .def_readwrite("nx", &GridSpec::nx)
      .def_readwrite("np", &GridSpec::np)
      .def("dx", &GridSpec::dx)
      .def("dp", &GridSpec::dp)
      .def("x", &GridSpec::x, py::arg("i"))
      .def("p", &GridSpec::p, py::arg("j"));

  m.def("eval_hamiltonian", &waveop::model::eval_hamiltonian, py::arg("spec"),
        py::arg("x"), py::arg("p"));

  py::class_<PhaseSpaceField>(m, "PhaseSpaceField")
      .def(py::init<>())
      .def_readwrite("grid", &PhaseSpaceField::grid)
      .def_readwrite("hbar", &PhaseSpaceField::hbar)
      .def_readwrite("values", &PhaseSpaceField::values)
      .def("norm2", &PhaseSpaceField::norm2)
      .def("normalize", &PhaseSpaceField::normalize);

  py::enum_<ExpectationRule>(m, "ExpectationRule")
      .value("bopp", ExpectationRule::bopp)
      .value("plain", ExpectationRule::plain);

  py::class_<waveop::phasespace::PhaseMoments>(m, "PhaseMoments")
      .def_readonly("energy", &waveop::phasespace::PhaseMoments::energy)
      .def_readonly("mean_x", &waveop::phasespace::PhaseMoments::mean_x)
      .def_readonly("mean_p", &waveop::phasespace::PhaseMoments::mean_p)
      .def_readonly("dx", &waveop::phasespace::PhaseMoments::dx)
      .def_readonly("dp", &waveop::phasespace::PhaseMoments::dp);

  py::class_<waveop::phasespace::FieldTrajectory>(m, "FieldTrajectory")
      .def_readonly("times", &waveop::phasespace::FieldTrajectory::times)
      .def_readonly("fields", &waveop::phasespace::FieldTrajectory::fields);

  m.def("make_field", &waveop::phasespace::make_field, py::arg("grid"),
        py::arg("hbar"));
  m.def("coherent_field", &waveop::phasespace::coherent_field, py::arg("grid"),
        py::arg("hbar"), py::arg("x0"), py::arg("p0"));
  m.def("wigner_weyl_of_operator", &waveop::phasespace::wigner_weyl_of_operator,
        py::arg("A"), py::arg("grid"), py::arg("hbar"));
  m.def("pure_state_wave_field", &waveop::phasespace::pure_state_wave_field,
        py::arg("psi"), py::arg("grid"), py::arg("hbar"));
  m.def(
      "moyal_star",
      [](const PhaseSpaceField& f, const PhaseSpaceField& g) {
        return waveop::phasespace::moyal_star(f, g);
      },
      py::arg("f"), py::arg("g"));
  m.def(
      "moyal_star",
      [](const HamiltonianSpec& f, const HamiltonianSpec& g,
         const GridSpec& grid, double hbar) {
        return waveop::phasespace::moyal_star(f, g, grid, hbar);
      },
      py::arg("f"), py::arg("g"), py::arg("grid"), py::arg("hbar"));
  m.def("expectation_phase", &waveop::phasespace::expectation_phase,
        py::arg("f"), py::arg("O"), py::arg("rule") = ExpectationRule::bopp,
        py::arg("normalize") = true);
  m.def("phase_moments", &waveop::phasespace::phase_moments, py::arg("f"),
        py::arg("H"), py::arg("rule"));
  m.def("spectral_tail_mass", &waveop::phasespace::spectral_tail_mass,
        py::arg("f"));
  m.def(
      "propagate_quantum_real",
      [](const PhaseSpaceField& f0, const HamiltonianSpec& H, double dt,
         long n_steps, long checkpoint_every,
         const std::optional<PhaseSpaceField>& F) {
        return waveop::phasespace::propagate_quantum_real(
            f0, H, maybe_ptr(F), dt, n_steps, checkpoint_every);
      },
      py::arg("f0"), py::arg("H"), py::arg("dt"), py::arg("n_steps"),
      py::arg("checkpoint_every"), py::arg("F") = std::nullopt);
  m.def(
      "propagate_classical_real",
      [](const PhaseSpaceField& f0, const HamiltonianSpec& H, double dt,
         long n_steps, long checkpoint_every,
         const std::optional<PhaseSpaceField>& F) {
        return waveop::phasespace::propagate_classical_real(
            f0, H, maybe_ptr(F), dt, n_steps, checkpoint_every);
      },
      py::arg("f0"), py::arg("H"), py::arg("dt"), py::arg("n_steps"),
      py::arg("checkpoint_every"), py::arg("F") = std::nullopt);

  py::class_<waveop::imagtime::ObservableSeries>(m, "ObservableSeries")
      .def_readonly("axis", &waveop::imagtime::ObservableSeries::axis)
      .def_readonly("energy", &waveop::imagtime::ObservableSeries::energy)
      .def_readonly("dx", &waveop::imagtime::ObservableSeries::dx)
      .def_readonly("dp", &waveop::imagtime::ObservableSeries::dp)
      .def_readonly("dxdp", &waveop::imagtime::ObservableSeries::dxdp)
      .def_readonly("norm_prerenorm",
                    &waveop::imagtime::ObservableSeries::norm_prerenorm)
      .def_readonly("tier", &waveop::imagtime::ObservableSeries::tier);

  py::class_<waveop::imagtime::BlochResult>(m, "BlochResult")
      .def_readonly("field", &waveop::imagtime::BlochResult::field)
      .def_readonly("series", &waveop::imagtime::BlochResult::series);

  m.def("uniform_initial_field", &waveop::imagtime::uniform_initial_field,
        py::arg("grid"), py::arg("hbar"));
  m.def("bloch_quantum", &waveop::imagtime::bloch_quantum, py::arg("f0"),
        py::arg("H"), py::arg("d_beta"), py::arg("n_steps"),
        py::arg("checkpoint_every") = 0);
  m.def("bloch_semiclassical", &waveop::imagtime::bloch_semiclassical,
        py::arg("f0"), py::arg("H"), py::arg("d_beta"), py::arg("n_steps"),
        py::arg("checkpoint_every") = 0);
  m.def("bloch_classical", &waveop::imagtime::bloch_classical, py::arg("f0"),
        py::arg("H"), py::arg("d_beta"), py::arg("n_steps"),
        py::arg("checkpoint_every") = 0);

  py::class_<waveop::hilbert::BoppMatrices>(m, "BoppMatrices")
      .def_readonly("x", &waveop::hilbert::BoppMatrices::x)
      .def_readonly("p", &waveop::hilbert::BoppMatrices::p)
      .def_readonly("theta", &waveop::hilbert::BoppMatrices::theta)
      .def_readonly("lam", &waveop::hilbert::BoppMatrices::lambda);

  m.def("build_position_momentum", &waveop::hilbert::build_position_momentum,
        py::arg("N"), py::arg("hbar"));
  m.def("build_bopp_matrices", &waveop::hilbert::build_bopp_matrices,
        py::arg("X"), py::arg("P"), py::arg("hbar"));
  m.def("evolve_wave_operator", &waveop::hilbert::evolve_wave_operator,
        py::arg("omega0"), py::arg("H"), py::arg("F"), py::arg("t"),
        py::arg("dt"), py::arg("hbar") = 1.0, py::arg("exact") = false);
  m.def("density_from_wave", &waveop::hilbert::density_from_wave,
        py::arg("omega"));
  m.def("expectation_wave", &waveop::hilbert::expectation_wave,
        py::arg("omega"), py::arg("O"), py::arg("normalize") = true);
  m.def("vectorize", &waveop::hilbert::vectorize, py::arg("omega"));
  m.def("devectorize", &waveop::hilbert::devectorize, py::arg("v"));
  m.def("left_action", &waveop::hilbert::left_action, py::arg("A"));
  m.def("right_action", &waveop::hilbert::right_action, py::arg("A"));
  m.def("gauge_transform", &waveop::hilbert::gauge_transform, py::arg("v"),
        py::arg("U"));
  m.def("bloch_wave_operator", &waveop::hilbert::bloch_wave_operator,
        py::arg("H"), py::arg("d_beta"), py::arg("n_steps"));

  m.def("annihilation", &waveop::oscillator::annihilation, py::arg("N"));
  m.def("oscillator_wavefunctions", &waveop::oscillator::wavefunctions,
        py::arg("N"), py::arg("x"), py::arg("hbar"));
  m.def("coherent_vector", &waveop::oscillator::coherent_vector, py::arg("N"),
        py::arg("x0"), py::arg("p0"), py::arg("hbar"));

  py::class_<waveop::oracle::SpectralDecomposition>(m, "SpectralDecomposition")
      .def_readonly("eigenvalues",
                    &waveop::oracle::SpectralDecomposition::eigenvalues)
      .def_readonly("eigenvectors",
                    &waveop::oracle::SpectralDecomposition::eigenvectors)
      .def_readonly("basis_size",
                    &waveop::oracle::SpectralDecomposition::basis_size)
      .def_readonly(
          "convergence_estimate",
          &waveop::oracle::SpectralDecomposition::convergence_estimate);

  py::class_<waveop::oracle::ThermalObservables>(m, "ThermalObservables")
      .def_readonly("energy", &waveop::oracle::ThermalObservables::energy)
      .def_readonly("dx", &waveop::oracle::ThermalObservables::dx)
      .def_readonly("dp", &waveop::oracle::ThermalObservables::dp);

  py::class_<waveop::oracle::DensityTrajectory>(m, "DensityTrajectory")
      .def_readonly("times", &waveop::oracle::DensityTrajectory::times)
      .def_readonly("states", &waveop::oracle::DensityTrajectory::states);

  m.def("decompose", &waveop::oracle::decompose, py::arg("H"), py::arg("N"));
  m.def("exact_diag_thermal", &waveop::oracle::exact_diag_thermal,
        py::arg("H"), py::arg("N"), py::arg("beta"));
  m.def("liouville_direct", &waveop::oracle::liouville_direct, py::arg("rho0"),
        py::arg("H"), py::arg("t"), py::arg("dt"), py::arg("hbar") = 1.0,
        py::arg("checkpoint_every") = 1);
  m.def("classical_gibbs_quadrature",
        &waveop::oracle::classical_gibbs_quadrature, py::arg("H"),
        py::arg("beta"));
  m.def("semiclassical_dense_reference",
        &waveop::oracle::semiclassical_dense_reference, py::arg("H"),
        py::arg("grid"), py::arg("beta"));
}
