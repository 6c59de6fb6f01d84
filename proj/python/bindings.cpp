#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pinchnet/channel.hpp"
#include "pinchnet/error.hpp"
#include "pinchnet/experiment.hpp"
#include "pinchnet/netcore.hpp"
#include "pinchnet/optimize.hpp"
#include "pinchnet/pamodels.hpp"
#include "pinchnet/system.hpp"

#include <sstream>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace pinchnet;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

CMatrix to_cmatrix(const ComplexArray& arr) {
    if (arr.ndim() != 2) {
        throw py::value_error("expected a 2-D complex array");
    }
    const auto rows = static_cast<std::size_t>(arr.shape(0));
    const auto cols = static_cast<std::size_t>(arr.shape(1));
    return CMatrix(rows, cols, std::vector<cplx>(arr.data(), arr.data() + rows * cols));
}

ComplexArray to_numpy(const CMatrix& m) {
    ComplexArray out({m.rows(), m.cols()});
    std::copy(m.entries().begin(), m.entries().end(), out.mutable_data());
    return out;
}

std::vector<CMatrix> to_cmatrices(const std::vector<ComplexArray>& arrs) {
    std::vector<CMatrix> out;
    out.reserve(arrs.size());
    for (const auto& a : arrs) {
        out.push_back(to_cmatrix(a));
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multiport pinching-antenna simulator and beamforming solvers";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<SingularMatrix>(m, "SingularMatrix", base.ptr());
    py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
    py::register_exception<DivisionByZero>(m, "DivisionByZero", base.ptr());
    py::register_exception<InfeasibleSpacing>(m, "InfeasibleSpacing", base.ptr());
    py::register_exception<DegenerateChannel>(m, "DegenerateChannel", base.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    // netcore
    m.def("solve_linear", [](const ComplexArray& a, const ComplexArray& b) {
        return to_numpy(solve_linear(to_cmatrix(a), to_cmatrix(b)));
    }, "a"_a, "b"_a);
    m.def("waveguide_scattering", [](double length, double beta_g) {
        return to_numpy(waveguide_scattering(length, beta_g));
    }, "length"_a, "beta_g"_a);
    m.def("impedance_to_scattering", [](const ComplexArray& z, double z0) {
        return to_numpy(impedance_to_scattering(to_cmatrix(z), z0));
    }, "z"_a, "z0"_a);
    m.def("check_energy_conservation", [](const ComplexArray& theta, double tol) {
        const auto r = check_energy_conservation(to_cmatrix(theta), tol);
        return py::make_tuple(r.passive, r.max_singular_value);
    }, "theta"_a, "tol"_a = 1e-10, "Returns (passive, sigma_max).");
    m.def("cascade_external", [](const std::vector<ComplexArray>& pas, const std::vector<double>& x, double beta_g) {
        return to_numpy(cascade_external(to_cmatrices(pas), x, beta_g));
    }, "pa_matrices"_a, "segment_lengths"_a, "beta_g"_a);

    // channel
    py::class_<Geometry>(m, "Geometry")
        .def(py::init([](double y_g, double z_g, std::array<double, 3> rx, double x_max) {
            Geometry g;
            g.y_g = y_g;
            g.z_g = z_g;
            g.receiver = {rx[0], rx[1], rx[2]};
            g.x_max = x_max;
            g.validate();
            return g;
        }), "y_g"_a = 0.0, "z_g"_a = 3.0, "receiver"_a = std::array<double, 3>{15.0, 0.0, 0.0}, "x_max"_a = 30.0)
        .def_readwrite("y_g", &Geometry::y_g)
        .def_readwrite("z_g", &Geometry::z_g)
        .def_readwrite("x_max", &Geometry::x_max)
        .def_property_readonly("receiver", [](const Geometry& g) {
            return std::array<double, 3>{g.receiver.x, g.receiver.y, g.receiver.z};
        })
        .def_property_readonly("xi", &Geometry::xi);

    py::class_<PathlossModel>(m, "PathlossModel")
        .def_static("free_space", &PathlossModel::free_space)
        .def_static("power_law", &PathlossModel::power_law, "c0"_a, "d0"_a, "alpha"_a)
        .def_property_readonly("is_free_space", [](const PathlossModel& p) {
            return p.kind == PathlossModel::Kind::FreeSpace;
        });

    m.def("wavelength_from_frequency", &wavelength_from_frequency, "frequency_hz"_a);
    m.def("guided_beta", &guided_beta, "lambda_"_a, "n_g"_a);
    m.def("pa_abscissas", [](const std::vector<double>& x) { return pa_abscissas(x); }, "segments"_a);
    m.def("distance", &distance, "s_n"_a, "geom"_a);
    m.def("channel_vector", [](const std::vector<double>& s, const Geometry& g, double lambda, const PathlossModel& model) {
        return channel_vector(s, g, lambda, model);
    }, "s"_a, "geom"_a, "lambda_"_a, "model"_a = PathlossModel::free_space());

    // pamodels
    m.def("dc_coefficients", [](double kappa, double varphi) {
        const auto c = dc_coefficients({kappa, varphi});
        return py::make_tuple(c.theta1, c.theta2);
    }, "kappa"_a, "varphi"_a);
    m.def("dc_three_port", [](double kappa, double varphi) {
        return to_numpy(dc_three_port({kappa, varphi}));
    }, "kappa"_a, "varphi"_a);
    m.def("dc_amp_phase", [](double kappa, double varphi) {
        const auto a = dc_amp_phase({kappa, varphi});
        return py::make_tuple(a.amp1, a.amp2, a.phase1, a.phase2);
    }, "kappa"_a, "varphi"_a, "Returns (|t1|, |t2|, arg t1, arg t2).");
    m.def("acpc_phase_span", [](double varphi) {
        const auto s = acpc_phase_span(varphi);
        return py::make_tuple(s.span, py::make_tuple(s.lo, s.hi));
    }, "varphi"_a);
    m.def("coupling_from_mode_impedances", [](double z0e, double z0o, double z0) {
        const auto r = coupling_from_mode_impedances(z0e, z0o, z0);
        return py::make_tuple(r.kappa, r.matched);
    }, "z0e"_a, "z0o"_a, "z0"_a);
    m.def("equal_power_coupling", &equal_power_coupling, "n"_a);

    // system
    m.def("e2e_single_general", [](const ComplexArray& theta, cplx h_tr, cplx h_tt, cplx h_rr,
                                   cplx gamma_t, cplx gamma_r, cplx gamma_l, double x0, double x1, double beta_g) {
        ChannelState ch = ChannelState::matched({h_tr});
        ch.h_tt(0, 0) = h_tt;
        ch.h_rr = h_rr;
        ch.gamma_t = gamma_t;
        ch.gamma_r = gamma_r;
        ch.gamma_l = gamma_l;
        return e2e_single_general(to_cmatrix(theta), ch, x0, x1, beta_g);
    }, "theta"_a, "h_tr"_a, "h_tt"_a = cplx{}, "h_rr"_a = cplx{}, "gamma_t"_a = cplx{},
       "gamma_r"_a = cplx{}, "gamma_l"_a = cplx{}, "x0"_a, "x1"_a, "beta_g"_a);
    m.def("e2e_multi_matched", [](const std::vector<ComplexArray>& pas, const std::vector<double>& segments,
                                  const std::vector<cplx>& h_tr, double beta_g) {
        SystemLayout layout;
        layout.beta_g = beta_g;
        layout.segments = segments;
        return e2e_multi_matched(to_cmatrices(pas), layout, h_tr);
    }, "pas"_a, "segments"_a, "h_tr"_a, "beta_g"_a);
    m.def("e2e_multi_general", [](const std::vector<ComplexArray>& pas, const std::vector<double>& segments,
                                  const std::vector<cplx>& h_tr, double beta_g, std::optional<ComplexArray> h_tt,
                                  cplx h_rr, cplx gamma_t, cplx gamma_r, cplx gamma_l) {
        SystemLayout layout;
        layout.beta_g = beta_g;
        layout.segments = segments;
        ChannelState ch = ChannelState::matched(h_tr);
        if (h_tt) {
            ch.h_tt = to_cmatrix(*h_tt);
        }
        ch.h_rr = h_rr;
        ch.gamma_t = gamma_t;
        ch.gamma_r = gamma_r;
        ch.gamma_l = gamma_l;
        return e2e_multi_general(to_cmatrices(pas), layout, ch);
    }, "pas"_a, "segments"_a, "h_tr"_a, "beta_g"_a, "h_tt"_a = py::none(), "h_rr"_a = cplx{},
       "gamma_t"_a = cplx{}, "gamma_r"_a = cplx{}, "gamma_l"_a = cplx{});
    m.def("dc_chain_gain", [](const std::vector<double>& kappas, const std::vector<double>& segments,
                              const std::vector<cplx>& h_tr, double beta_g, double varphi) {
        SystemLayout layout;
        layout.beta_g = beta_g;
        layout.segments = segments;
        return dc_chain_gain(kappas, layout, h_tr, varphi);
    }, "kappas"_a, "segments"_a, "h_tr"_a, "beta_g"_a, "varphi"_a);
    m.def("channel_gain", &channel_gain, "coefficient"_a);

    // optimize
    py::enum_<PositionMode>(m, "PositionMode")
        .value("Optimized", PositionMode::Optimized)
        .value("FixedHeuristic", PositionMode::FixedHeuristic);
    py::enum_<PAModel>(m, "PAModel")
        .value("Ideal", PAModel::Ideal)
        .value("DC", PAModel::DC)
        .value("Baseline", PAModel::Baseline);

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def(py::init<>())
        .def_readwrite("num_pas", &ProblemSpec::num_pas)
        .def_readwrite("dx_min", &ProblemSpec::dx_min)
        .def_readwrite("geom", &ProblemSpec::geom)
        .def_readwrite("lambda_", &ProblemSpec::lambda)
        .def_readwrite("n_g", &ProblemSpec::n_g)
        .def_readwrite("varphi", &ProblemSpec::varphi)
        .def_readwrite("model", &ProblemSpec::model)
        .def_readwrite("position_mode", &ProblemSpec::position_mode)
        .def_property_readonly("beta_g", &ProblemSpec::beta_g);

    py::class_<Solution>(m, "Solution")
        .def_readonly("model", &Solution::model)
        .def_readonly("s", &Solution::s)
        .def_readonly("gain", &Solution::gain)
        .def_readonly("trace", &Solution::trace)
        .def_readonly("restarts_used", &Solution::restarts_used)
        .def_readonly("seed", &Solution::seed)
        .def_property_readonly("kappas", [](const Solution& s) -> py::object {
            if (const auto* c = std::get_if<CouplerParams>(&s.params)) {
                return py::cast(c->kappas);
            }
            return py::none();
        })
        .def_property_readonly("coefficients", [](const Solution& s) {
            std::vector<std::pair<cplx, cplx>> out;
            for (const auto& pa : s.coefficients()) {
                out.emplace_back(pa.theta1, pa.theta2);
            }
            return out;
        }, "(theta1, theta2) per PA");

    m.def("ideal_optimal_positions", &ideal_optimal_positions, "spec"_a);
    m.def("heuristic_fixed_positions", &heuristic_fixed_positions, "spec"_a);
    m.def("ideal_optimal_scattering", [](const std::vector<cplx>& h, const std::vector<double>& s, double beta_g) {
        std::vector<std::pair<cplx, cplx>> out;
        for (const auto& pa : ideal_optimal_scattering(h, s, beta_g)) {
            out.emplace_back(pa.theta1, pa.theta2);
        }
        return out;
    }, "h_tr"_a, "s"_a, "beta_g"_a);
    m.def("ideal_solve", &ideal_solve, "spec"_a);
    m.def("dc_alternating_solve", [](const ProblemSpec& spec, std::size_t restarts, std::uint64_t seed) {
        py::gil_scoped_release release;
        return dc_alternating_solve(spec, restarts, seed);
    }, "spec"_a, "restarts"_a = 1, "seed"_a = 1);
    m.def("baseline_solve", [](const ProblemSpec& spec) {
        py::gil_scoped_release release;
        return baseline_solve(spec);
    }, "spec"_a);
    m.def("evaluate_gain", &evaluate_gain, "spec"_a, "solution"_a);

    // experiments
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def("set", &ExperimentConfig::set, "key"_a, "value"_a)
        .def("load_file", &ExperimentConfig::load_file, "path"_a)
        .def("validate", &ExperimentConfig::validate)
        .def("resolved", &ExperimentConfig::resolved);
    m.def("gain_sweep_csv", [](const ExperimentConfig& cfg) {
        std::ostringstream out;
        {
            py::gil_scoped_release release;
            write_gain_csv(out, cfg, run_gain_sweep(cfg));
        }
        return out.str();
    }, "config"_a);
    m.def("kappa_sweep_csv", [](const ExperimentConfig& cfg) {
        std::ostringstream out;
        write_kappa_csv(out, cfg, run_kappa_sweep(cfg.varphi_deg * kPi / 180.0, cfg.kappa_grid));
        return out.str();
    }, "config"_a);
    m.def("mismatch_csv", [](const ExperimentConfig& cfg) {
        std::ostringstream out;
        {
            py::gil_scoped_release release;
            write_mismatch_csv(out, cfg, run_mismatch_study(cfg));
        }
        return out.str();
    }, "config"_a);
}
