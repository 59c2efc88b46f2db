#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "zeno/cavity1d.hpp"
#include "zeno/errors.hpp"
#include "zeno/formfactor.hpp"
#include "zeno/freedecay.hpp"
#include "zeno/projective.hpp"
#include "zeno/renorm.hpp"
#include "zeno/sweeps.hpp"
#include "zeno/timedomain.hpp"

namespace py = pybind11;
using namespace zeno;

PYBIND11_MODULE(_zeno, m) {
    m.doc() = "Quantum Zeno and anti-Zeno decay rates for a two-level atom";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<Lorentzian>(m, "Lorentzian")
        .def(py::init([](double gamma, double delta, double mu0) {
                 Lorentzian l{gamma, delta, mu0};
                 validate(FormFactor{l});
                 return l;
             }),
             py::arg("gamma") = 1.0, py::arg("delta") = 1.0, py::arg("mu0") = 0.0)
        .def_readwrite("gamma", &Lorentzian::gamma)
        .def_readwrite("delta", &Lorentzian::delta)
        .def_readwrite("mu0", &Lorentzian::mu0);
    py::class_<Flat>(m, "Flat")
        .def(py::init([](double gamma, std::optional<double> cutoff, double center) {
                 Flat f{gamma, cutoff, center};
                 validate(FormFactor{f});
                 return f;
             }),
             py::arg("gamma") = 1.0, py::arg("cutoff") = std::nullopt, py::arg("center") = 0.0)
        .def_readwrite("gamma", &Flat::gamma)
        .def_readwrite("cutoff", &Flat::cutoff)
        .def_readwrite("center", &Flat::center);
    py::class_<Tabulated>(m, "Tabulated")
        .def(py::init([](std::vector<double> mu, std::vector<double> g2) {
                 Tabulated t{std::move(mu), std::move(g2)};
                 validate(FormFactor{t});
                 return t;
             }),
             py::arg("mu"), py::arg("g2"))
        .def_readwrite("mu", &Tabulated::mu)
        .def_readwrite("g2", &Tabulated::g2);
    py::class_<GeometricSplit>(m, "GeometricSplit")
        .def_readonly("eps_inf", &GeometricSplit::eps_inf);
    m.def("geometric_split", &make_geometric_split, py::arg("base"), py::arg("eps_inf"));

    py::class_<AtomParams>(m, "Atom")
        .def(py::init([](double omega) { return AtomParams{omega}; }), py::arg("omega") = 0.0)
        .def_readwrite("omega", &AtomParams::omega);

    m.def("form_factor", [](const FormFactor& ff, double mu) { return evaluate(ff, mu); },
          py::arg("ff"), py::arg("mu"));
    m.def("variance", &variance, py::arg("ff"));
    m.def("fgr_rate", &fgr_rate, py::arg("ff"), py::arg("atom"));
    m.def("leaky_cavity", &leaky_cavity_form_factor, py::arg("g"), py::arg("kappa"), py::arg("omega0"));
    m.def("perturbative_survival",
          [](const FormFactor& ff, const AtomParams& a, double t) { return perturbative_survival(ff, a, t); },
          py::arg("ff"), py::arg("atom"), py::arg("t"));

    m.def("poles",
          [](double gamma, double delta, double omega, double mu0) {
              auto p = poles(gamma, delta, omega, mu0);
              return py::make_tuple(p.lambda1, p.lambda2);
          },
          py::arg("gamma"), py::arg("delta"), py::arg("omega"), py::arg("mu0") = 0.0);
    m.def("lorentzian_survival",
          [](double gamma, double delta, double omega, double mu0, double t) {
              return survival_probability(poles(gamma, delta, omega, mu0), gamma, delta, mu0, t);
          },
          py::arg("gamma"), py::arg("delta"), py::arg("omega"), py::arg("mu0") = 0.0, py::arg("t"));
    m.def("pdc_survival",
          [](double g, double mismatch, double t) { return pdc_survival(PdcParams{g, mismatch}, t); },
          py::arg("g"), py::arg("mismatch"), py::arg("t"));

    py::class_<SurvivalModel>(m, "SurvivalModel")
        .def_static("lorentzian", &SurvivalModel::lorentzian, py::arg("gamma"), py::arg("delta"),
                    py::arg("omega"), py::arg("mu0") = 0.0)
        .def_static("flat", &SurvivalModel::flat, py::arg("gamma") = 1.0)
        .def("probability", &SurvivalModel::probability)
        .def("log_probability", &SurvivalModel::log_probability);
    m.def("gamma_zeno", &gamma_zeno, py::arg("s"), py::arg("t"));
    m.def("gamma_conventional", &gamma_conventional, py::arg("s"), py::arg("t"));
    m.def("decay_rate_repeated", &decay_rate_repeated, py::arg("s"), py::arg("tau_i"));
    m.def("weight_repeated", &weight_repeated, py::arg("mu"), py::arg("omega"), py::arg("tau_i"));
    m.def("weight_flat", &weight_flat, py::arg("mu"), py::arg("omega"), py::arg("tau_r"));
    m.def("find_transition_interval",
          [](const SurvivalModel& s, double free_rate) { return find_transition_interval(s, free_rate); },
          py::arg("s"), py::arg("free_rate"));
    m.def("optimum_interval",
          [](const SurvivalModel& s) -> std::optional<std::pair<double, double>> {
              auto o = optimum_interval(s);
              if (!o) return std::nullopt;
              return std::make_pair(o->tau, o->rate);
          },
          py::arg("s"));

    py::class_<NoMeasurement>(m, "NoMeasurement").def(py::init<>());
    py::class_<FlatResponse>(m, "FlatResponse")
        .def(py::init([](double tau_r) { return FlatResponse{tau_r}; }), py::arg("tau_r"))
        .def_readwrite("tau_r", &FlatResponse::tau_r);
    py::class_<ActiveBand>(m, "ActiveBand")
        .def(py::init([](double dd, double tau_r, std::optional<double> c) { return ActiveBand{dd, tau_r, c}; }),
             py::arg("delta_d"), py::arg("tau_r"), py::arg("center") = std::nullopt)
        .def_readwrite("delta_d", &ActiveBand::delta_d)
        .def_readwrite("tau_r", &ActiveBand::tau_r);
    py::class_<InactiveBand>(m, "InactiveBand")
        .def(py::init([](double dd, double tau_r, std::optional<double> c) { return InactiveBand{dd, tau_r, c}; }),
             py::arg("delta_d_bar"), py::arg("tau_r"), py::arg("center") = std::nullopt)
        .def_readwrite("delta_d_bar", &InactiveBand::delta_d_bar)
        .def_readwrite("tau_r", &InactiveBand::tau_r);
    py::class_<Geometric>(m, "Geometric")
        .def(py::init([](double eps_inf, double tau_r) { return Geometric{eps_inf, tau_r}; }),
             py::arg("eps_inf"), py::arg("tau_r"));
    py::class_<CustomResponse>(m, "CustomResponse")
        .def(py::init([](std::vector<double> e, std::vector<double> eta) { return CustomResponse{e, eta}; }),
             py::arg("eps"), py::arg("eta"));

    m.def("renormalized_density",
          [](const FormFactor& ff, const DetectorResponse& r, const AtomParams& a, double mu) {
              return renormalized_density(ff, r, a, mu);
          },
          py::arg("ff"), py::arg("response"), py::arg("atom"), py::arg("mu"));
    m.def("measured_rate",
          [](const FormFactor& ff, const DetectorResponse& r, const AtomParams& a) {
              return measured_rate(ff, r, a);
          },
          py::arg("ff"), py::arg("response"), py::arg("atom"));
    m.def("flat_response_rate", &flat_response_rate, py::arg("gamma"), py::arg("delta"),
          py::arg("detuning"), py::arg("tau_r"));
    m.def("phase_boundary_flat", &phase_boundary_flat, py::arg("detuning"), py::arg("delta"));
    m.def("optimum_tau_flat",
          [](double detuning, double delta) -> std::optional<py::dict> {
              auto o = optimum_tau_flat(detuning, delta);
              if (!o) return std::nullopt;
              py::dict d;
              d["tau_r"] = o->tau_r;
              d["max_ratio"] = o->max_ratio;
              d["max_enhancement"] = o->max_enhancement;
              return d;
          },
          py::arg("detuning"), py::arg("delta"));
    m.def("banded_rate", &banded_rate, py::arg("gamma"), py::arg("delta_d"), py::arg("tau_r"));
    m.def("false_measurement_rate", &false_measurement_rate, py::arg("gamma"),
          py::arg("delta_d_bar"), py::arg("tau_r"));

    py::enum_<Integrator>(m, "Integrator")
        .value("AUTO", Integrator::Auto)
        .value("RK4", Integrator::Rk4)
        .value("EXPM", Integrator::Expm);
    py::class_<LatticeConfig>(m, "LatticeConfig")
        .def(py::init<>())
        .def_readwrite("eps_min", &LatticeConfig::eps_min)
        .def_readwrite("eps_max", &LatticeConfig::eps_max)
        .def_readwrite("n_modes", &LatticeConfig::n_modes)
        .def_readwrite("dt", &LatticeConfig::dt)
        .def_readwrite("t_max", &LatticeConfig::t_max)
        .def_readwrite("samples", &LatticeConfig::samples)
        .def_readwrite("method", &LatticeConfig::method);
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("s", &Trajectory::s)
        .def_readonly("eps", &Trajectory::eps)
        .def_readonly("r", &Trajectory::r)
        .def_readonly("max_conservation_error", &Trajectory::max_conservation_error)
        .def_readonly("method", &Trajectory::method)
        .def_readonly("dt", &Trajectory::dt)
        .def_readonly("lattice_modes", &Trajectory::lattice_modes);
    m.def("default_lattice", &default_lattice, py::arg("ff"), py::arg("response"), py::arg("atom"),
          py::arg("t_max"));
    m.def("evolve", &evolve, py::arg("ff"), py::arg("response"), py::arg("atom"), py::arg("lattice"),
          py::call_guard<py::gil_scoped_release>());
    m.def("late_rate", &late_rate, py::arg("trajectory"), py::arg("t0"), py::arg("t1"));

    py::class_<SlabConfig>(m, "SlabConfig")
        .def(py::init([](double l, double eta, double lambda_a) { return SlabConfig{l, eta, lambda_a}; }),
             py::arg("l") = 1.0, py::arg("eta") = 1.0, py::arg("lambda_a") = 1.0);
    m.def("cavity_rate_ratio", &decay_rate_ratio, py::arg("slab"), py::arg("x"));
    m.def("cavity_rate_profile", &decay_rate_profile, py::arg("slab"), py::arg("x"));

    auto sweep_dict = [](const SweepResult& r) {
        py::dict d;
        d["detunings"] = r.axis1;
        d["taus"] = r.axis2;
        d["values"] = r.values;
        py::list b, o;
        for (const auto& p : r.boundary) b.append(py::make_tuple(p.detuning, p.tau));
        for (const auto& p : r.optimum) o.append(py::make_tuple(p.detuning, p.tau, p.value));
        d["boundary"] = b;
        d["optimum"] = o;
        return d;
    };
    m.def("sweep_repeated",
          [=](double gamma, double delta, std::vector<double> dets, std::vector<double> taus, int threads) {
              return sweep_dict(sweep_repeated(gamma, delta, dets, taus, SweepOptions{threads}));
          },
          py::arg("gamma"), py::arg("delta"), py::arg("detunings"), py::arg("taus"), py::arg("threads") = 1);
    m.def("sweep_continuous",
          [=](double gamma, double delta, std::vector<double> dets, std::vector<double> taus, int threads) {
              return sweep_dict(sweep_continuous(gamma, delta, dets, taus, SweepOptions{threads}));
          },
          py::arg("gamma"), py::arg("delta"), py::arg("detunings"), py::arg("taus"), py::arg("threads") = 1);

    m.def("run_cli",
          [](std::vector<std::string> args) {
              args.insert(args.begin(), "zeno");
              std::ostringstream out, err;
              int code = cli::run(args, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"), "Run a command-line invocation; returns (exit_code, stdout, stderr).");
}
