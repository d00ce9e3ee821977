#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qteleport/bloch.hpp"
#include "qteleport/montecarlo.hpp"
#include "qteleport/stabilizer.hpp"
#include "qteleport/teleport.hpp"

namespace py = pybind11;
using namespace qtel;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Noisy qudit teleportation: fidelity, deviation, Monte-Carlo "
              "oracles and differential-evolution stabilization.";

    py::class_<Channel>(m, "Channel")
        .def_readonly("d", &Channel::d)
        .def_readonly("gamma", &Channel::gamma)
        .def("__repr__", [](const Channel& ch) {
            return "Channel(d=" + std::to_string(ch.d) +
                   ", gamma=" + std::to_string(ch.gamma) + ")";
        });

    py::class_<Protocol>(m, "Protocol")
        .def_readonly("d", &Protocol::d)
        .def_property_readonly("corrections",
                               [](const Protocol& p) { return p.X; },
                               "the d^2 correction operators X_alpha = V_alpha U_alpha^dagger")
        .def("__repr__", [](const Protocol& p) {
            return "Protocol(d=" + std::to_string(p.d) + ", " +
                   std::to_string(p.X.size()) + " outcomes)";
        });

    py::class_<FDReport>(m, "FDReport")
        .def_readonly("F", &FDReport::F)
        .def_readonly("D", &FDReport::D)
        .def_property_readonly("method",
                               [](const FDReport& r) {
                                   return r.method == FDReport::Method::analytic
                                              ? "analytic"
                                              : "monte_carlo";
                               })
        .def_readonly("samples", &FDReport::samples)
        .def_readonly("stderr_F", &FDReport::stderr_F)
        .def_readonly("stderr_D", &FDReport::stderr_D);

    py::class_<MeanStderr>(m, "MeanStderr")
        .def_readonly("mean", &MeanStderr::mean)
        .def_readonly("stderr", &MeanStderr::stderr_);

    py::class_<FidelityBounds>(m, "FidelityBounds")
        .def_readonly("f_min", &FidelityBounds::f_min)
        .def_readonly("f_max", &FidelityBounds::f_max)
        .def_readonly("d_max", &FidelityBounds::d_max);

    py::class_<QubitDeviationReport>(m, "QubitDeviationReport")
        .def_readonly("F", &QubitDeviationReport::F)
        .def_readonly("D", &QubitDeviationReport::D)
        .def_readonly("deltas", &QubitDeviationReport::deltas)
        .def_readonly("covariance", &QubitDeviationReport::covariance);

    py::class_<BoundCheck>(m, "BoundCheck")
        .def_readonly("ok", &BoundCheck::ok)
        .def_readonly("margin", &BoundCheck::margin);

    py::class_<DeteriorationRow>(m, "DeteriorationRow")
        .def_readonly("eta", &DeteriorationRow::eta)
        .def_readonly("mean_F", &DeteriorationRow::mean_F)
        .def_readonly("std_F", &DeteriorationRow::std_F)
        .def_readonly("mean_D", &DeteriorationRow::mean_D)
        .def_readonly("std_D", &DeteriorationRow::std_D)
        .def_readonly("trials", &DeteriorationRow::trials)
        .def_readonly("seed", &DeteriorationRow::seed);

    py::class_<DEConfig>(m, "DEConfig")
        .def_readonly("n_pop", &DEConfig::n_pop)
        .def_readonly("weight", &DEConfig::weight)
        .def_readonly("crossover", &DEConfig::crossover)
        .def_readonly("iterations", &DEConfig::iterations)
        .def_readonly("seed", &DEConfig::seed);

    py::class_<GenRecord>(m, "GenRecord")
        .def_readonly("iteration", &GenRecord::iteration)
        .def_readonly("best_F", &GenRecord::best_F)
        .def_readonly("best_D", &GenRecord::best_D)
        .def_readonly("pop_mean_F", &GenRecord::pop_mean_F)
        .def_readonly("shock", &GenRecord::shock);

    py::class_<RecoverTrace>(m, "RecoverTrace")
        .def_readonly("gamma", &RecoverTrace::gamma)
        .def_readonly("run_id", &RecoverTrace::run_id)
        .def_readonly("seed", &RecoverTrace::seed)
        .def_readonly("records", &RecoverTrace::records);

    m.def("make_channel", &make_channel, py::arg("d"), py::arg("gamma"),
          "Isotropic resource: gamma on the maximally entangled state, the "
          "rest white noise.");
    m.def("optimal_protocol", &optimal_protocol, py::arg("d"),
          "Weyl-Heisenberg measurement basis with V_alpha = U_alpha; every "
          "correction is the identity.");
    m.def(
        "random_protocol",
        [](int d, std::uint64_t seed) {
            Rng rng(seed);
            return random_protocol(d, rng);
        },
        py::arg("d"), py::arg("seed"));
    m.def("load_protocol", &load_protocol, py::arg("path"));
    m.def("save_protocol", &save_protocol, py::arg("protocol"), py::arg("path"));
    m.def("is_complete", &is_complete, py::arg("protocol"), py::arg("tol") = 1e-9);

    m.def("analytic_F", &analytic_F, py::arg("protocol"), py::arg("channel"),
          "Closed-form average teleportation fidelity over Haar inputs.");
    m.def("entanglement_quantity_E", &entanglement_quantity_E, py::arg("protocol"),
          py::arg("channel"));
    m.def("input_fidelity", &input_fidelity, py::arg("protocol"), py::arg("channel"),
          py::arg("phi"), "Fidelity f for one input state phi.");
    m.def("schur_mean_xi", &schur_mean_xi, py::arg("X"), py::arg("d"),
          "Haar mean of |<phi|X|phi>|^2: (|tr X|^2 + d) / (d (d+1)).");
    m.def("fidelity_bounds", &fidelity_bounds, py::arg("channel"),
          py::arg("mean_delta") = 0.0);

    m.def("qubit_F", &qubit_F, py::arg("protocol"), py::arg("channel"));
    m.def("qubit_D_analytic", &qubit_D_analytic, py::arg("protocol"),
          py::arg("channel"),
          "Closed-form fidelity deviation at d = 2 from the pairwise "
          "covariances of the correction rotations.");
    m.def("tight_bound_check", &tight_bound_check, py::arg("F"), py::arg("D"),
          py::arg("channel"));

    m.def(
        "mc_estimate_FD",
        [](const Protocol& proto, const Channel& ch, long samples,
           std::uint64_t seed, int threads, long batch) {
            MCConfig cfg;
            cfg.samples = samples;
            cfg.seed = seed;
            cfg.batch = batch;
            return mc_estimate_FD(proto, ch, cfg, threads);
        },
        py::arg("protocol"), py::arg("channel"), py::arg("samples") = 100000,
        py::arg("seed") = 0, py::arg("threads") = 1, py::arg("batch") = 4096,
        py::call_guard<py::gil_scoped_release>(),
        "Haar-sampling estimate of (F, D); reproducible for a fixed seed "
        "independent of the thread count.");
    m.def("mc_schur_xi", &mc_schur_xi, py::arg("X"), py::arg("samples"),
          py::arg("seed"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "perturb_protocol",
        [](const Protocol& proto, double eta, std::uint64_t seed) {
            Rng rng(seed);
            return perturb_protocol(proto, make_noise(eta), rng);
        },
        py::arg("protocol"), py::arg("eta"), py::arg("seed"),
        "Operational noise: every parameter jittered by eta * U[-pi, pi].");
    m.def(
        "deterioration_experiment",
        [](const Channel& ch, const std::vector<double>& eta_grid, long trials,
           long samples, std::uint64_t seed, int threads) {
            MCConfig cfg;
            cfg.samples = samples;
            cfg.seed = seed;
            return deterioration_experiment(ch, eta_grid, trials, cfg, threads);
        },
        py::arg("channel"), py::arg("eta_grid"), py::arg("trials"),
        py::arg("samples") = 100000, py::arg("seed") = 0, py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());

    m.def("make_de_config", &make_de_config, py::arg("n_pop"), py::arg("weight"),
          py::arg("crossover"), py::arg("iterations"), py::arg("seed"));
    m.def("recover_experiment", &recover_experiment, py::arg("channels"),
          py::arg("config"), py::arg("repeats"), py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>(),
          "Independent DE runs from random populations; one trace per "
          "(channel, repeat).");
    m.def(
        "realtime_stabilization",
        [](const Channel& ch, const DEConfig& cfg, int shock_period, double eta,
           int cycles, int repeats, int threads) {
            return realtime_stabilization(ch, cfg, shock_period, make_noise(eta),
                                          cycles, repeats, threads);
        },
        py::arg("channel"), py::arg("config"), py::arg("shock_period"),
        py::arg("eta"), py::arg("cycles"), py::arg("repeats"),
        py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>(),
        "Evolution interleaved with periodic operational shocks.");
}
