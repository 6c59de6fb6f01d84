#include "pinchnet/optimize.hpp"

#include "pinchnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace pinchnet {

namespace {

// Uniform double in [lo, hi) from the raw 64-bit stream, so restarts are
// reproducible across standard library implementations.
double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

double sum_sq(std::span<const cplx> h) {
    double total = 0.0;
    for (const auto& z : h) {
        total += std::norm(z);
    }
    return total;
}

std::vector<MatchedIdealPA> coupler_coefficients(std::span<const double> kappas, double varphi) {
    std::vector<MatchedIdealPA> out;
    out.reserve(kappas.size());
    for (const double k : kappas) {
        const auto c = dc_coefficients({k, varphi});
        out.push_back({c.theta1, c.theta2});
    }
    return out;
}

/// Gain of the DC chain at fixed positions as a function of psi, scaled by
/// 1 / sum |h_n|^2 so the objective is a dimensionless efficiency in [0, 1].
class KappaObjective {
public:
    KappaObjective(const ProblemSpec& spec, std::span<const double> s) : varphi_(spec.varphi) {
        const CVector h = spec.channel(s);
        const double total = sum_sq(h);
        if (!(total > 0.0)) {
            throw DegenerateChannel("DC kappa subproblem: channel vector is zero");
        }
        scale_ = 1.0 / total;
        weights_.reserve(h.size());
        const double beta = spec.beta_g();
        for (std::size_t n = 0; n < h.size(); ++n) {
            weights_.push_back(h[n] * std::polar(1.0, -beta * s[n]));
        }
    }

    double raw(std::span<const double> psi) const {
        cplx total{};
        cplx through = 1.0;
        for (std::size_t n = 0; n < psi.size(); ++n) {
            const auto c = dc_coefficients({kappa_from_psi(psi[n]), varphi_});
            total += weights_[n] * c.theta2 * through;
            through *= c.theta1;
        }
        return std::norm(total);
    }

    double operator()(std::span<const double> psi) const { return raw(psi) * scale_; }

    std::size_t size() const { return weights_.size(); }

private:
    double varphi_;
    double scale_ = 1.0;
    CVector weights_;
};

struct FDProbe {
    std::vector<double> gradient;
    std::vector<double> plus;
    std::vector<double> minus;
};

FDProbe probe(const KappaObjective& f, std::span<const double> psi, double step) {
    FDProbe out;
    const std::size_t n = psi.size();
    out.gradient.resize(n);
    out.plus.resize(n);
    out.minus.resize(n);
    std::vector<double> x(psi.begin(), psi.end());
    for (std::size_t i = 0; i < n; ++i) {
        const double keep = x[i];
        x[i] = keep + step;
        out.plus[i] = f(x);
        x[i] = keep - step;
        out.minus[i] = f(x);
        x[i] = keep;
        out.gradient[i] = (out.plus[i] - out.minus[i]) / (2.0 * step);
    }
    return out;
}

double inf_norm(std::span<const double> v) {
    double best = 0.0;
    for (const double x : v) {
        best = std::max(best, std::abs(x));
    }
    return best;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

} // namespace

std::string to_string(PositionMode mode) {
    return mode == PositionMode::Optimized ? "optimized" : "fixed";
}

std::string to_string(PAModel model) {
    switch (model) {
    case PAModel::Ideal:
        return "ideal";
    case PAModel::DC:
        return "dc";
    case PAModel::Baseline:
        return "baseline";
    }
    return "unknown";
}

void ProblemSpec::validate() const {
    if (num_pas == 0) {
        throw InvalidArgument("ProblemSpec: need at least one PA");
    }
    if (!(dx_min > 0.0)) {
        throw InvalidArgument("ProblemSpec: dx_min must be positive");
    }
    if (!(lambda > 0.0) || !(n_g > 0.0)) {
        throw InvalidArgument("ProblemSpec: lambda and n_g must be positive");
    }
    if (!(varphi > 0.0 && varphi < kPi)) {
        throw InvalidArgument("ProblemSpec: varphi must lie in (0, pi)");
    }
    geom.validate();
    model.validate();
    if (static_cast<double>(num_pas - 1) * dx_min > geom.x_max) {
        throw InfeasibleSpacing("ProblemSpec: (N-1)*dx_min = " +
                                std::to_string(static_cast<double>(num_pas - 1) * dx_min) +
                                " exceeds x_max = " + std::to_string(geom.x_max));
    }
}

std::vector<MatchedIdealPA> Solution::coefficients() const {
    if (const auto* ideal = std::get_if<IdealParams>(&params)) {
        return ideal->pas;
    }
    const auto& c = std::get<CouplerParams>(params);
    return coupler_coefficients(c.kappas, c.varphi);
}

std::vector<CMatrix> Solution::scattering() const {
    std::vector<CMatrix> out;
    for (const auto& pa : coefficients()) {
        out.push_back(pa.scattering());
    }
    return out;
}

std::vector<double> ideal_optimal_positions(const ProblemSpec& spec) {
    spec.validate();
    const std::size_t n = spec.num_pas;
    const double block = static_cast<double>(n - 1) * spec.dx_min;
    const double x_max = spec.geom.x_max;
    const double center = std::min(std::max(spec.geom.receiver.x, block / 2.0), x_max - block / 2.0);

    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double offset = static_cast<double>(i + 1) - static_cast<double>(n + 1) / 2.0;
        s[i] = std::clamp(center + offset * spec.dx_min, 0.0, x_max);
    }
    return s;
}

std::vector<double> heuristic_fixed_positions(const ProblemSpec& spec) {
    return ideal_optimal_positions(spec);
}

std::vector<MatchedIdealPA> ideal_optimal_scattering(std::span<const cplx> h_tr,
                                                     std::span<const double> s, double beta_g) {
    if (h_tr.size() != s.size()) {
        throw InvalidArgument("ideal_optimal_scattering: h_TR and positions differ in length");
    }
    const std::size_t n = h_tr.size();
    // tail[i] = sum_{k >= i} |h_k|^2
    std::vector<double> tail(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        tail[i] = tail[i + 1] + std::norm(h_tr[i]);
    }
    if (n == 0 || !(tail[0] > 0.0)) {
        throw DegenerateChannel("ideal_optimal_scattering: channel vector is zero");
    }

    std::vector<MatchedIdealPA> pas(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (tail[i] > 0.0) {
            const double amp1 = std::sqrt(tail[i + 1] / tail[i]);
            const double amp2 = std::sqrt(std::norm(h_tr[i]) / tail[i]);
            // theta1 is real, so theta2 alone cancels the channel and
            // in-guide phase of link i.
            const double phase2 = beta_g * s[i] - std::arg(h_tr[i]);
            pas[i] = {cplx{amp1, 0.0}, std::polar(amp2, std::remainder(phase2, 2.0 * kPi))};
        } else {
            // Nothing left to radiate downstream: pass through.
            pas[i] = {cplx{1.0, 0.0}, cplx{}};
        }
    }
    return pas;
}

Solution ideal_solve(const ProblemSpec& spec) {
    Solution sol;
    sol.model = PAModel::Ideal;
    sol.s = spec.position_mode == PositionMode::Optimized ? ideal_optimal_positions(spec)
                                                          : heuristic_fixed_positions(spec);
    const CVector h = spec.channel(sol.s);
    sol.params = IdealParams{ideal_optimal_scattering(h, sol.s, spec.beta_g())};
    sol.gain = sum_sq(h);
    sol.trace = {sol.gain};
    return sol;
}

double evaluate_gain(const ProblemSpec& spec, const Solution& sol) {
    const CVector h = spec.channel(sol.s);
    const auto coeffs = sol.coefficients();
    return channel_gain(matched_chain_coefficient(coeffs, sol.s, h, spec.beta_g()));
}

std::vector<double> kappas_from_psi(std::span<const double> psi) {
    std::vector<double> out(psi.size());
    std::transform(psi.begin(), psi.end(), out.begin(), kappa_from_psi);
    return out;
}

std::vector<double> psi_gradient(const ProblemSpec& spec, std::span<const double> s,
                                 std::span<const double> psi, double step) {
    const KappaObjective f(spec, s);
    return probe(f, psi, step).gradient;
}

KappaResult dc_kappa_subproblem(const ProblemSpec& spec, std::span<const double> s,
                                std::span<const double> psi0, const SolverOptions& opts) {
    if (psi0.size() != s.size()) {
        throw InvalidArgument("dc_kappa_subproblem: psi0 and positions differ in length");
    }
    const KappaObjective f(spec, s);
    const std::size_t n = s.size();

    std::vector<double> psi(psi0.begin(), psi0.end());
    double value = f(psi);

    KappaResult result;
    result.trace.push_back(value);

    // Inverse-Hessian approximation of -f, row-major n x n.
    std::vector<double> hinv(n * n, 0.0);
    auto reset_hessian = [&] {
        std::fill(hinv.begin(), hinv.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            hinv[i * n + i] = 1.0;
        }
    };
    reset_hessian();

    constexpr double kMaxStep = 5.0;
    // Past atanh(kKappaMax) the objective is exactly flat, so an iterate
    // that wanders there can never come back. Keep psi on the edge instead.
    const double psi_cap = std::atanh(kKappaMax);
    FDProbe fd = probe(f, psi, opts.fd_step);

    for (int it = 0; it < opts.max_bfgs_iterations; ++it) {
        std::vector<double> dir(n, 0.0);
        double slope = 0.0;

        if (inf_norm(fd.gradient) <= opts.grad_tol) {
            // First-order stationary. Escape along a coordinate where both
            // neighbours are strictly better (e.g. psi = 0, where f is even
            // in every coordinate); otherwise this is a maximizer.
            std::size_t escape = n;
            double best = value;
            for (std::size_t i = 0; i < n; ++i) {
                const double side = std::max(fd.plus[i], fd.minus[i]);
                if (fd.plus[i] > value && fd.minus[i] > value && side > best) {
                    best = side;
                    escape = i;
                }
            }
            if (escape == n) {
                break;
            }
            reset_hessian();
            dir[escape] = fd.plus[escape] >= fd.minus[escape] ? 1.0 : -1.0;
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < n; ++k) {
                    dir[i] += hinv[i * n + k] * fd.gradient[k];
                }
            }
            slope = dot(fd.gradient, dir);
            if (!(slope > 0.0)) {
                reset_hessian();
                dir = fd.gradient;
                slope = dot(fd.gradient, dir);
            }
        }

        const double longest = inf_norm(dir);
        if (longest > kMaxStep) {
            const double shrink = kMaxStep / longest;
            for (auto& d : dir) {
                d *= shrink;
            }
            slope *= shrink;
        }

        // Armijo backtracking, halving; only strict ascent is accepted.
        std::vector<double> candidate(n);
        double candidate_value = value;
        bool accepted = false;
        for (double t = 1.0; t >= 1e-20; t *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) {
                candidate[i] = std::clamp(psi[i] + t * dir[i], -psi_cap, psi_cap);
            }
            candidate_value = f(candidate);
            if (candidate_value > value && candidate_value >= value + opts.armijo_c * t * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            break;
        }

        FDProbe next = probe(f, candidate, opts.fd_step);

        // BFGS update for the minimized function -f.
        std::vector<double> step(n);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            step[i] = candidate[i] - psi[i];
            y[i] = fd.gradient[i] - next.gradient[i];
        }
        const double sy = dot(step, y);
        if (sy > 1e-12 * std::sqrt(dot(step, step) * dot(y, y))) {
            const double rho = 1.0 / sy;
            std::vector<double> hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < n; ++k) {
                    hy[i] += hinv[i * n + k] * y[k];
                }
            }
            const double yhy = dot(y, hy);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < n; ++k) {
                    hinv[i * n + k] += -rho * (hy[i] * step[k] + step[i] * hy[k]) +
                                       (rho * rho * yhy + rho) * step[i] * step[k];
                }
            }
        }

        const double improvement = candidate_value - value;
        psi = candidate;
        value = candidate_value;
        fd = std::move(next);
        result.trace.push_back(value);

        if (improvement <= opts.rel_improvement_tol * std::abs(value)) {
            break;
        }
    }

    result.gain = f.raw(psi);
    result.psi = std::move(psi);
    return result;
}

namespace {

struct GridBest {
    double x;
    double gain;
};

// Two-stage grid maximization of `gain_at` over [lo, hi], starting from the
// incumbent. Coarse samples land up to 1/16 of a phase period off each lobe
// peak, which costs far more than the pathloss difference between lobes, so
// every coarse local maximum gets a refined pass, not only the coarse argmax.
template <class F>
GridBest grid_search(double lo, double hi, double coarse, double fine, GridBest incumbent, F gain_at,
                     std::vector<double>& xs, std::vector<double>& gs) {
    GridBest best = incumbent;
    const auto steps = static_cast<std::size_t>(std::floor((hi - lo) / coarse));
    xs.clear();
    gs.clear();
    for (std::size_t k = 0; k <= steps + 1; ++k) {
        const double x = k <= steps ? lo + static_cast<double>(k) * coarse : hi;
        xs.push_back(x);
        gs.push_back(gain_at(x));
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const bool peak = (k == 0 || gs[k] >= gs[k - 1]) && (k + 1 == xs.size() || gs[k] >= gs[k + 1]);
        if (!peak) {
            continue;
        }
        if (gs[k] > best.gain) {
            best = {xs[k], gs[k]};
        }
        const double wlo = std::max(lo, xs[k] - coarse);
        const double whi = std::min(hi, xs[k] + coarse);
        const auto fine_steps = static_cast<std::size_t>(std::floor((whi - wlo) / fine));
        for (std::size_t f = 0; f <= fine_steps + 1; ++f) {
            const double x = f <= fine_steps ? wlo + static_cast<double>(f) * fine : whi;
            const double g = gain_at(x);
            if (g > best.gain) {
                best = {x, g};
            }
        }
    }
    return best;
}

} // namespace

std::vector<double> position_sweep(const ProblemSpec& spec, std::span<const MatchedIdealPA> coeffs,
                                   std::span<const double> s_in, const SolverOptions& opts) {
    const std::size_t n = s_in.size();
    if (coeffs.size() != n) {
        throw InvalidArgument("position_sweep: coefficient and position counts differ");
    }
    std::vector<double> s(s_in.begin(), s_in.end());
    if (n == 0) {
        return s;
    }

    const double beta = spec.beta_g();
    const double x_max = spec.geom.x_max;
    const double coarse = spec.guided_wavelength() / opts.coarse_divisor;
    const double fine = spec.guided_wavelength() / opts.fine_divisor;

    // Position-independent chain factor theta2_n * prod_{i<n} theta1_i.
    CVector chain(n);
    cplx through = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        chain[i] = coeffs[i].theta2 * through;
        through *= coeffs[i].theta1;
    }

    auto term = [&](std::size_t i, double x) {
        return chain[i] * channel_coefficient(distance(x, spec.geom), spec.lambda, spec.model) *
               std::polar(1.0, -beta * x);
    };

    CVector terms(n);
    for (std::size_t i = 0; i < n; ++i) {
        terms[i] = term(i, s[i]);
    }

    const double full_before =
        channel_gain(matched_chain_coefficient(coeffs, s, spec.channel(s), beta));
    const std::vector<double> s_before = s;
    std::vector<double> xs;
    std::vector<double> gs;

    for (std::size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? 0.0 : s[i - 1] + spec.dx_min;
        const double hi = i + 1 == n ? x_max : s[i + 1] - spec.dx_min;
        if (!(hi > lo)) {
            continue;
        }

        cplx rest{};
        for (std::size_t k = 0; k < n; ++k) {
            if (k != i) {
                rest += terms[k];
            }
        }
        const double incumbent = std::norm(rest + terms[i]);
        const GridBest best = grid_search(lo, hi, coarse, fine, {s[i], incumbent},
                                          [&](double x) { return std::norm(rest + term(i, x)); }, xs, gs);
        if (best.gain > incumbent) {
            s[i] = best.x;
            terms[i] = term(i, best.x);
        }
    }

    if (opts.block_shift_window > 0.0) {
        // Rigid translation of all PAs. Single-coordinate moves cannot
        // shift a block whose neighbours sit at minimum spacing.
        auto shifted_gain = [&](double delta) {
            cplx total{};
            for (std::size_t i = 0; i < n; ++i) {
                total += term(i, s[i] + delta);
            }
            return std::norm(total);
        };
        const double window = opts.block_shift_window * spec.dx_min;
        const double lo = std::max(-s.front(), -window);
        const double hi = std::min(x_max - s.back(), window);
        if (hi > lo) {
            const GridBest best = grid_search(lo, hi, coarse, fine, {0.0, shifted_gain(0.0)}, shifted_gain, xs, gs);
            if (best.x != 0.0) {
                for (auto& x : s) {
                    x += best.x;
                }
            }
        }
    }

    // Guard against the incremental sum and the chain formula rounding
    // differently: never hand back a configuration that evaluates lower.
    const double full_after = channel_gain(matched_chain_coefficient(coeffs, s, spec.channel(s), beta));
    if (full_after < full_before) {
        return s_before;
    }
    return s;
}

std::vector<double> dc_position_subproblem(const ProblemSpec& spec, std::span<const double> kappas,
                                           std::span<const double> s, const SolverOptions& opts) {
    const auto coeffs = coupler_coefficients(kappas, spec.varphi);
    return position_sweep(spec, coeffs, s, opts);
}

std::vector<double> project_feasible(std::vector<double> s, double dx_min, double x_max) {
    std::sort(s.begin(), s.end());
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = i == 0 ? 0.0 : s[i - 1] + dx_min;
        const double hi = x_max - static_cast<double>(n - 1 - i) * dx_min;
        s[i] = std::clamp(s[i], lo, std::max(lo, hi));
    }
    return s;
}

namespace {

struct RestartOutcome {
    std::vector<double> s;
    std::vector<double> psi;
    double gain = -1.0;
    std::vector<double> trace;
};

RestartOutcome run_restart(const ProblemSpec& spec, std::uint64_t seed, const SolverOptions& opts) {
    std::mt19937_64 rng(seed);
    const std::size_t n = spec.num_pas;
    const bool move = spec.position_mode == PositionMode::Optimized;

    RestartOutcome out;
    out.s = move ? ideal_optimal_positions(spec) : heuristic_fixed_positions(spec);
    if (move) {
        for (auto& x : out.s) {
            x += uniform(rng, -spec.dx_min / 2.0, spec.dx_min / 2.0);
        }
        out.s = project_feasible(std::move(out.s), spec.dx_min, spec.geom.x_max);
    }
    out.psi.resize(n);
    for (auto& p : out.psi) {
        p = uniform(rng, -1.0, 1.0);
    }

    auto gain_of = [&](std::span<const double> s, std::span<const double> psi) {
        const auto kappas = kappas_from_psi(psi);
        return channel_gain(dc_chain_coefficient(kappas, s, spec.channel(s), spec.beta_g(), spec.varphi));
    };

    double gain = gain_of(out.s, out.psi);
    out.trace.push_back(gain);

    for (int outer = 0; outer < opts.max_outer_iterations; ++outer) {
        const double start = gain;
        KappaResult kr = dc_kappa_subproblem(spec, out.s, out.psi, opts);
        out.psi = std::move(kr.psi);
        gain = std::max(gain, gain_of(out.s, out.psi));
        out.trace.push_back(gain);

        if (move) {
            out.s = dc_position_subproblem(spec, kappas_from_psi(out.psi), out.s, opts);
            gain = std::max(gain, gain_of(out.s, out.psi));
            out.trace.push_back(gain);
        }
        if (!move || gain - start <= opts.outer_tol * gain) {
            break;
        }
    }

    // The last position move may shift the kappa optimum; finish on kappa.
    if (move) {
        KappaResult kr = dc_kappa_subproblem(spec, out.s, out.psi, opts);
        out.psi = std::move(kr.psi);
        gain = std::max(gain, gain_of(out.s, out.psi));
        out.trace.push_back(gain);
    }
    out.gain = gain_of(out.s, out.psi);
    return out;
}

} // namespace

Solution dc_alternating_solve(const ProblemSpec& spec, std::size_t restarts, std::uint64_t seed,
                              const SolverOptions& opts) {
    spec.validate();
    if (restarts == 0) {
        throw InvalidArgument("dc_alternating_solve: need at least one restart");
    }

    RestartOutcome best;
    for (std::size_t r = 0; r < restarts; ++r) {
        RestartOutcome out = run_restart(spec, seed + r, opts);
        // Strict comparison keeps the lowest restart index on ties.
        if (out.gain > best.gain) {
            best = std::move(out);
        }
    }

    Solution sol;
    sol.model = PAModel::DC;
    sol.s = std::move(best.s);
    sol.params = CouplerParams{kappas_from_psi(best.psi), spec.varphi};
    sol.gain = best.gain;
    sol.trace = std::move(best.trace);
    sol.restarts_used = restarts;
    sol.seed = seed;
    return sol;
}

Solution baseline_solve(const ProblemSpec& spec, const SolverOptions& opts) {
    spec.validate();
    const std::size_t n = spec.num_pas;
    CouplerParams params{equal_power_coupling(n), kPi / 2.0};
    const auto coeffs = coupler_coefficients(params.kappas, params.varphi);

    Solution sol;
    sol.model = PAModel::Baseline;
    sol.s = ideal_optimal_positions(spec);

    auto gain_of = [&](std::span<const double> s) {
        return channel_gain(matched_chain_coefficient(coeffs, s, spec.channel(s), spec.beta_g()));
    };

    double gain = gain_of(sol.s);
    sol.trace.push_back(gain);
    if (spec.position_mode == PositionMode::Optimized) {
        for (int sweep = 0; sweep < opts.max_baseline_sweeps; ++sweep) {
            sol.s = position_sweep(spec, coeffs, sol.s, opts);
            const double next = gain_of(sol.s);
            const double improvement = next - gain;
            gain = std::max(gain, next);
            sol.trace.push_back(gain);
            if (improvement <= opts.outer_tol * gain) {
                break;
            }
        }
    }
    sol.params = std::move(params);
    sol.gain = gain_of(sol.s);
    return sol;
}

} // namespace pinchnet
