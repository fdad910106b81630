// SPDX-License-Identifier: Apache-2.0

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "covert/allocation.hpp"
#include "covert/channel.hpp"
#include "covert/covertness.hpp"
#include "covert/detector.hpp"
#include "covert/scaling.hpp"

namespace py = pybind11;
using namespace covert;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Covert communication over MIMO AWGN channels";

  static py::exception<Error> covert_error(m, "CovertError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::handle(covert_error.ptr())(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(covert_error.ptr(), err.ptr());
    }
  });

  py::class_<ArrayGeometry>(m, "ArrayGeometry")
      .def(py::init<std::int64_t, double>(), py::arg("num_antennas"), py::arg("antenna_separation"))
      .def_static("with_length", &ArrayGeometry::with_length, py::arg("num_antennas"), py::arg("array_length"))
      .def_property_readonly("num_antennas", &ArrayGeometry::num_antennas)
      .def_property_readonly("antenna_separation", &ArrayGeometry::antenna_separation)
      .def_property_readonly("array_length", &ArrayGeometry::array_length);

  py::class_<MimoScenario>(m, "MimoScenario")
      .def(py::init([](CMatrix h_b, CMatrix h_w, double sigma_b2, double sigma_w2, double power) {
             MimoScenario s{std::move(h_b), std::move(h_w), sigma_b2, sigma_w2, power};
             s.validate();
             return s;
           }),
           py::arg("h_b"), py::arg("h_w"), py::arg("sigma_b2") = 1.0, py::arg("sigma_w2") = 1.0,
           py::arg("power") = 1.0)
      .def_readwrite("h_b", &MimoScenario::h_b)
      .def_readwrite("h_w", &MimoScenario::h_w)
      .def_readwrite("sigma_b2", &MimoScenario::sigma_b2)
      .def_readwrite("sigma_w2", &MimoScenario::sigma_w2)
      .def_readwrite("power", &MimoScenario::power_budget);

  py::class_<EigenStructure>(m, "EigenStructure")
      .def_readonly("lambda_b", &EigenStructure::lambda_b)
      .def_readonly("lambda_w_rotated", &EigenStructure::lambda_w_rotated)
      .def_readonly("bob_basis", &EigenStructure::bob_basis)
      .def_property_readonly("dims", &EigenStructure::dims);

  py::class_<CovertBudget>(m, "CovertBudget")
      .def(py::init([](std::uint64_t n, double delta) {
             CovertBudget b{n, delta};
             b.validate();
             return b;
           }),
           py::arg("n"), py::arg("delta"))
      .def_readonly("n", &CovertBudget::blocklength)
      .def_readonly("delta", &CovertBudget::detection_level)
      .def_property_readonly("kl_threshold", &CovertBudget::kl_threshold);

  py::class_<PowerAllocation>(m, "PowerAllocation")
      .def_static("from_directions", &PowerAllocation::from_directions, py::arg("eig"), py::arg("q"))
      .def_static("zero", &PowerAllocation::zero, py::arg("eig"))
      .def_readonly("per_direction", &PowerAllocation::per_direction)
      .def_readonly("covariance", &PowerAllocation::covariance)
      .def_property_readonly("total_power", &PowerAllocation::total_power);

  py::class_<AllocationResult>(m, "AllocationResult")
      .def_readonly("allocation", &AllocationResult::allocation)
      .def_readonly("rate", &AllocationResult::rate)
      .def_readonly("kl_value", &AllocationResult::kl_value)
      .def_readonly("mu", &AllocationResult::mu)
      .def_readonly("eta", &AllocationResult::eta)
      .def_readonly("power_active", &AllocationResult::power_active)
      .def_readonly("kl_active", &AllocationResult::kl_active)
      .def_readonly("kkt_residual", &AllocationResult::kkt_residual);

  py::class_<NormalizedShares>(m, "NormalizedShares")
      .def(py::init([](RVector c) {
             NormalizedShares s{std::move(c)};
             s.validate();
             return s;
           }),
           py::arg("c"))
      .def_readonly("c", &NormalizedShares::c);

  py::class_<NullSteering>(m, "NullSteering")
      .def_readonly("k", &NullSteering::k)
      .def_readonly("omega", &NullSteering::omega)
      .def_readonly("bob_gain", &NullSteering::bob_gain)
      .def_readonly("rate", &NullSteering::rate);

  py::class_<ScalingResult>(m, "ScalingResult")
      .def_readonly("total", &ScalingResult::total)
      .def_readonly("per_direction", &ScalingResult::per_direction)
      .def_readonly("bounds", &ScalingResult::bounds);

  py::class_<DetectionOutcome>(m, "DetectionOutcome")
      .def_readonly("alpha", &DetectionOutcome::alpha)
      .def_readonly("beta", &DetectionOutcome::beta)
      .def_readonly("threshold", &DetectionOutcome::threshold)
      .def_readonly("error_sum", &DetectionOutcome::error_sum)
      .def_readonly("pinsker_floor", &DetectionOutcome::pinsker_floor)
      .def_readonly("trials", &DetectionOutcome::trials)
      .def_readonly("confidence_halfwidth", &DetectionOutcome::confidence_halfwidth);

  m.def("beam_gain", &beam_gain, py::arg("geometry"), py::arg("omega"));
  m.def("rotated_eigen", &rotated_eigen, py::arg("scenario"));

  m.def("kl_term", &kl_term, py::arg("x"));
  m.def("kl_single_letter", &kl_single_letter, py::arg("alloc"), py::arg("eig"), py::arg("sigma_w2"));
  m.def("kl_gaussian", &kl_gaussian, py::arg("covariance"), py::arg("h_w"), py::arg("sigma_w2"));
  m.def("detection_lower_bound", &detection_lower_bound, py::arg("kl_n"));
  m.def("lambert_w_minus1", &lambert_w_minus1, py::arg("x"));
  m.def("kl_inverse", &kl_inverse, py::arg("eps"));
  m.def(
      "min_antennas",
      [](double xi_w, std::int64_t n_w, double sigma_w2, const ArrayGeometry& geometry, double omega,
         const CovertBudget& budget, double power) {
        return min_antennas(WillieLink{xi_w, n_w, sigma_w2}, geometry, omega, budget, power);
      },
      py::arg("xi_w"), py::arg("n_w"), py::arg("sigma_w2"), py::arg("geometry"), py::arg("omega"),
      py::arg("budget"), py::arg("power"));

  m.def("optimize_covariance",
        py::overload_cast<const MimoScenario&, const CovertBudget&>(&optimize_covariance),
        py::arg("scenario"), py::arg("budget"));
  m.def("normalized_shares", &normalized_shares, py::arg("alloc"), py::arg("eig"), py::arg("sigma_w2"));
  m.def("uniform_shares", &uniform_shares, py::arg("eig"));
  m.def("closed_form_allocation", &closed_form_allocation, py::arg("eig"), py::arg("shares"),
        py::arg("sigma_w2"), py::arg("budget"));
  m.def("null_steer_index", &null_steer_index, py::arg("tx"), py::arg("omega_b"), py::arg("omega_w"),
        py::arg("power"), py::arg("lambda_b"), py::arg("sigma_b2"));

  m.def("rate_cc", &rate_cc, py::arg("scenario"), py::arg("alloc"));
  m.def("rate_secrecy", &rate_secrecy, py::arg("scenario"), py::arg("alloc"));
  m.def("scaling_L", &scaling_L, py::arg("eig"), py::arg("shares"), py::arg("sigma_b2"),
        py::arg("sigma_w2"), py::arg("real_input") = false);
  m.def("scaling_LS", &scaling_LS, py::arg("eig"), py::arg("shares"), py::arg("sigma_b2"),
        py::arg("sigma_w2"), py::arg("real_input") = false);
  m.def("finite_n_normalized_rate", &finite_n_normalized_rate, py::arg("scenario"),
        py::arg("blocklengths"), py::arg("delta"));

  m.def("exact_error_sum",
        py::overload_cast<const MimoScenario&, const PowerAllocation&, std::uint64_t>(&exact_error_sum),
        py::arg("scenario"), py::arg("alloc"), py::arg("n"));
  m.def(
      "monte_carlo_detection",
      [](const MimoScenario& s, const PowerAllocation& a, std::uint64_t n, std::uint64_t trials,
         std::uint64_t seed, bool per_symbol, unsigned threads) {
        py::gil_scoped_release release;
        return monte_carlo_detection(s, a, n, trials, seed, MonteCarloOptions{per_symbol, threads});
      },
      py::arg("scenario"), py::arg("alloc"), py::arg("n"), py::arg("trials"), py::arg("seed") = 0,
      py::arg("per_symbol") = false, py::arg("threads") = 0);
}
