// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. argv[1] is the pinchnet CLI (needed for the determinism
// check).

#include "oracle.hpp"

#include "pinchnet/experiment.hpp"
#include "pinchnet/netcore.hpp"
#include "pinchnet/optimize.hpp"
#include "pinchnet/pamodels.hpp"
#include "pinchnet/system.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace pinchnet;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0.0 && secs > budget_s) {
        out.ok = false;
        out.detail += " (over time budget)";
    }
    if (!out.ok) {
        ++failures;
    }
    std::printf("%s  %-32s %7.2fs  %s\n", out.ok ? "PASS" : "FAIL", name.c_str(), secs, out.detail.c_str());
    std::fflush(stdout);
}

double rel_diff(double got, double want) { return std::abs(got - want) / std::abs(want); }

// Free-space gain written out from the geometry, independent of the channel module.
double free_space_power(double s, const Geometry& g, double lambda) {
    const double dx = s - g.receiver.x;
    const double dy = g.y_g - g.receiver.y;
    const double dz = g.z_g - g.receiver.z;
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double a = lambda / (4.0 * 3.14159265358979323846 * d);
    return a * a;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string slurp_without_wall_ms(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::string line;
    std::ostringstream out;
    int wall_col = -1;
    while (std::getline(in, line)) {
        if (line.starts_with("#")) {
            out << line << '\n';
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (wall_col < 0) {
            const auto it = std::find(cells.begin(), cells.end(), "wall_ms");
            wall_col = it == cells.end() ? -2 : static_cast<int>(it - cells.begin());
        } else if (wall_col >= 0 && wall_col < static_cast<int>(cells.size())) {
            cells[static_cast<std::size_t>(wall_col)].clear();
        }
        for (const auto& c : cells) {
            out << c << ',';
        }
        out << '\n';
    }
    return out.str();
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const double lambda = wavelength_from_frequency(15e9);
    const double n_g = 1.4;
    const double beta_g = guided_beta(lambda, n_g);

    criterion("oracle equivalence", 5.0, [&] {
        std::mt19937_64 rng(20240601);
        std::uniform_int_distribution<std::size_t> pick_n(1, 8);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const Geometry geom;
        const auto model = PathlossModel::free_space();
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = pick_n(rng);
            const auto s = oracle::random_feasible_positions(rng, n, 0.5, geom.x_max);
            std::vector<double> kappas(n);
            for (auto& k : kappas) {
                k = u(rng);
            }
            const double varphi = 0.05 + 3.0 * u(rng);
            const auto layout = SystemLayout::from_abscissas(s, beta_g, geom, lambda, model);
            const CVector h = layout.channel();
            std::vector<CMatrix> pas;
            for (const double k : kappas) {
                pas.push_back(dc_three_port({k, varphi}));
            }

            const cplx chain = dc_chain_gain(kappas, layout, h, varphi);
            const cplx matched = e2e_multi_matched(pas, layout, h);
            const cplx general = e2e_multi_general(pas, layout, ChannelState::matched(h));

            oracle::Network net;
            net.pas = pas;
            net.segments = layout.segments;
            net.beta_g = beta_g;
            net.h_tr = h;
            net.h_tt = CMatrix(n, n);
            const cplx brute = oracle::voltage_ratio(net);

            for (const cplx z : {chain, matched, general}) {
                worst = std::max(worst, oracle::relative_error(z, brute));
            }
        }
        return Outcome{worst <= 1e-10, "worst rel " + fmt(worst) + " over 200 configs"};
    });

    criterion("losslessness / quadrature", 1.0, [&] {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> uk(0.0, kKappaMax);
        std::uniform_real_distribution<double> up(1e-6, 3.14159265358979323846 - 1e-6);
        double worst_power = 0.0;
        double worst_closed = 0.0;
        double worst_arg = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const DCParams p{uk(rng), up(rng)};
            const auto c = dc_coefficients(p);
            const auto ap = dc_amp_phase(p);
            worst_power = std::max(worst_power, std::abs(std::norm(c.theta1) + std::norm(c.theta2) - 1.0));
            worst_power = std::max(worst_power, std::abs(ap.amp1 * ap.amp1 + ap.amp2 * ap.amp2 - 1.0));
            worst_closed = std::max(worst_closed, std::abs(ap.phase2 - ap.phase1 - 3.14159265358979323846 / 2.0));
            // arguments taken directly from the complex values; skip the
            // kappa = 0 corner where theta2 has no phase
            if (std::abs(c.theta2) > 1e-6) {
                const double d = std::remainder(std::arg(c.theta2) - std::arg(c.theta1) - 3.14159265358979323846 / 2.0,
                                                2.0 * 3.14159265358979323846);
                worst_arg = std::max(worst_arg, std::abs(d));
            }
        }
        const bool ok = worst_power <= 1e-12 && worst_closed <= 1e-12 && worst_arg <= 1e-12;
        return Outcome{ok, "power " + fmt(worst_power) + ", closed-form phase " + fmt(worst_closed) +
                               ", arg phase " + fmt(worst_arg)};
    });

    criterion("ideal optimum certificate", 5.0, [&] {
        double worst_gain = 0.0;
        double worst_cascade = 0.0;
        int cases = 0;
        for (const std::size_t n : {1, 2, 4, 8, 16}) {
            for (const double dx : {0.2, 0.5, 1.0}) {
                for (const auto mode : {PositionMode::Optimized, PositionMode::FixedHeuristic}) {
                    ProblemSpec spec;
                    spec.num_pas = n;
                    spec.dx_min = dx;
                    spec.position_mode = mode;
                    const auto sol = ideal_solve(spec);
                    double bound = 0.0;
                    for (const double x : sol.s) {
                        bound += free_space_power(x, spec.geom, spec.lambda);
                    }
                    worst_gain = std::max(worst_gain, rel_diff(sol.gain, bound));

                    const CVector h = spec.channel(sol.s);
                    const auto coeffs = ideal_optimal_scattering(h, sol.s, spec.beta_g());
                    std::vector<CMatrix> pas;
                    for (const auto& c : coeffs) {
                        pas.push_back(c.scattering());
                    }
                    const auto layout =
                        SystemLayout::from_abscissas(sol.s, spec.beta_g(), spec.geom, spec.lambda, spec.model);
                    const double via_cascade = std::norm(e2e_multi_general(pas, layout, ChannelState::matched(h)));
                    worst_cascade = std::max(worst_cascade, rel_diff(via_cascade, bound));
                    ++cases;
                }
            }
        }
        const bool ok = worst_gain <= 1e-12 && worst_cascade <= 1e-10;
        return Outcome{ok, std::to_string(cases) + " specs, gain rel " + fmt(worst_gain) + ", cascade rel " +
                               fmt(worst_cascade)};
    });

    // Solutions from the ordering run feed the stationarity criterion.
    struct DcCase {
        ProblemSpec spec;
        Solution sol;
    };
    std::vector<DcCase> dc_cases;

    criterion("solver ordering", 120.0, [&] {
        ExperimentConfig cfg;
        cfg.varphi_deg = 45.0;
        cfg.restarts = 20;
        cfg.seed = 1;
        std::ostringstream detail;
        bool ok = true;
        double min_ratio_05 = 1.0;
        double worst_dc_margin = 1.0;
        double worst_base_margin = 1.0;
        for (const double dx : {0.5, 1.0}) {
            cfg.dx_min = dx;
            for (const std::size_t n : {2, 4, 6, 8}) {
                const auto ideal = solve(cfg, PAModel::Ideal, n);
                const auto dc = solve(cfg, PAModel::DC, n);
                const auto base = solve(cfg, PAModel::Baseline, n);
                const double slack = 1e-9 * ideal.gain;
                if (!(ideal.gain + slack >= dc.gain) || !(dc.gain + slack >= base.gain)) {
                    ok = false;
                    detail << "[order broken at dx=" << dx << " N=" << n << "] ";
                }
                worst_dc_margin = std::min(worst_dc_margin, (ideal.gain - dc.gain) / ideal.gain);
                worst_base_margin = std::min(worst_base_margin, (dc.gain - base.gain) / ideal.gain);
                if (dx == 0.5) {
                    min_ratio_05 = std::min(min_ratio_05, dc.gain / ideal.gain);
                }
                dc_cases.push_back({cfg.problem(n), dc});
            }
        }
        if (min_ratio_05 < 0.95) {
            ok = false;
        }
        detail << "min (ideal-DC)/ideal " << fmt(worst_dc_margin) << ", min (DC-base)/ideal "
               << fmt(worst_base_margin) << ", min DC/ideal at dx 0.5 " << fmt(min_ratio_05);
        return Outcome{ok, detail.str()};
    });

    criterion("stationarity", 0.0, [&] {
        if (dc_cases.empty()) {
            return Outcome{false, "no DC solutions from the ordering run"};
        }
        double worst = 0.0;
        int clamped = 0;
        for (const auto& c : dc_cases) {
            const auto& kappas = std::get<CouplerParams>(c.sol.params).kappas;
            std::vector<double> psi(kappas.size());
            std::transform(kappas.begin(), kappas.end(), psi.begin(), [](double k) { return std::atanh(k); });
            const auto grad = psi_gradient(c.spec, c.sol.s, psi);
            for (std::size_t i = 0; i < grad.size(); ++i) {
                if (kappas[i] >= kKappaMax) {
                    ++clamped;  // one-sided objective at the clamp
                    continue;
                }
                worst = std::max(worst, std::abs(grad[i]));
            }
        }
        return Outcome{worst <= 1e-6, std::to_string(dc_cases.size()) + " solutions, worst |grad| " + fmt(worst) +
                                          ", " + std::to_string(clamped) + " clamped coordinates"};
    });

    criterion("fixed-position regime", 120.0, [&] {
        ExperimentConfig cfg;
        cfg.dx_min = 0.2;
        cfg.position_mode = PositionMode::FixedHeuristic;
        double worst = 0.0;
        std::vector<double> base_gains;
        for (std::size_t n = 2; n <= 12; ++n) {
            const auto spec = cfg.problem(n);
            const auto ideal = solve(cfg, PAModel::Ideal, n);
            double bound = 0.0;
            for (const double x : ideal.s) {
                bound += free_space_power(x, spec.geom, spec.lambda);
            }
            worst = std::max(worst, rel_diff(ideal.gain, bound));
            base_gains.push_back(solve(cfg, PAModel::Baseline, n).gain);
        }
        int drops = 0;
        for (std::size_t i = 1; i < base_gains.size(); ++i) {
            drops += base_gains[i] < base_gains[i - 1] ? 1 : 0;
        }
        return Outcome{worst <= 1e-12 && drops >= 1,
                       "ideal rel " + fmt(worst) + ", baseline decreases " + std::to_string(drops) + " times"};
    });

    criterion("phase-displacement constant", 0.0, [&] {
        const double dd = 2.0 * 3.14159265358979323846 / beta_g;
        const bool ok = dd >= 0.0142 && dd <= 0.0150 && std::abs(dd - lambda / n_g) < 1e-15;
        return Outcome{ok, "2pi/beta_g = " + std::to_string(dd) + " m"};
    });

    criterion("determinism", 0.0, [&] {
        if (cli.empty()) {
            return Outcome{false, "CLI path not given"};
        }
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / ("pinchnet_accept_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        {
            std::ofstream cfg(dir / "det.cfg");
            cfg << "n_list = 1,2,3,5\nrestarts = 4\nseed = 99\ndx_min = 0.5\n";
        }
        std::string outs[2];
        for (int run = 0; run < 2; ++run) {
            const fs::path out = dir / ("run" + std::to_string(run) + ".csv");
            const std::string cmd =
                "\"" + cli + "\" gain-sweep --config \"" + (dir / "det.cfg").string() + "\" --out \"" + out.string() + "\"";
            if (std::system(cmd.c_str()) != 0) {
                fs::remove_all(dir);
                return Outcome{false, "CLI run failed: " + cmd};
            }
            outs[run] = slurp_without_wall_ms(out);
        }
        fs::remove_all(dir);
        const bool ok = !outs[0].empty() && outs[0] == outs[1];
        return Outcome{ok, ok ? "two runs identical apart from wall_ms" : "CSV outputs differ"};
    });

    criterion("mismatch regression", 0.0, [&] {
        std::mt19937_64 rng(4242);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_real_distribution<double> ph(-3.14159265358979, 3.14159265358979);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            // generic passive PA: lossless symmetric block scaled by a random factor
            CMatrix theta = oracle::random_symmetric_unitary(rng);
            const double scale = 0.2 + 0.8 * u(rng);
            for (std::size_t r = 0; r < 3; ++r) {
                for (std::size_t c = 0; c < 3; ++c) {
                    theta(r, c) *= scale;
                }
            }
            const cplx h = std::polar(1e-3 * (0.1 + u(rng)), ph(rng));
            const double x0 = 30.0 * u(rng);
            const double x1 = 30.0 - x0;
            const cplx general = e2e_single_general(theta, ChannelState::matched(CVector{h}), x0, x1, beta_g);
            const cplx feed = std::polar(1.0, -beta_g * x0);
            const cplx simple = feed * h * theta(2, 0) / (1.0 + feed * feed * theta(0, 0));
            worst = std::max(worst, oracle::relative_error(general, simple));
        }
        return Outcome{worst <= 1e-12, "worst rel " + fmt(worst) + " over 100 instances"};
    });

    std::printf("%s\n", failures == 0 ? "ALL PASS" : (std::to_string(failures) + " FAILED").c_str());
    return failures == 0 ? 0 : 1;
}
