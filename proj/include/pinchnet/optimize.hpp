#pragma once

// Beamforming solvers: the closed-form optimum for fully reconfigurable
// PAs, alternating quasi-Newton / coordinate search for directional-coupler
// PAs, and the fixed-coupling baseline.

#include "pinchnet/channel.hpp"
#include "pinchnet/pamodels.hpp"
#include "pinchnet/system.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pinchnet {

enum class PositionMode { Optimized, FixedHeuristic };
enum class PAModel { Ideal, DC, Baseline };

std::string to_string(PositionMode mode);
std::string to_string(PAModel model);

struct ProblemSpec {
    std::size_t num_pas = 1;
    double dx_min = 0.5;
    Geometry geom;
    double lambda = wavelength_from_frequency(15e9);
    double n_g = 1.4;
    double varphi = kPi / 2.0;  // DC coupling length, radians
    PathlossModel model;
    PositionMode position_mode = PositionMode::Optimized;

    double beta_g() const { return guided_beta(lambda, n_g); }
    double guided_wavelength() const { return lambda / n_g; }
    CVector channel(std::span<const double> s) const { return channel_vector(s, geom, lambda, model); }

    void validate() const;
};

/// Tuning knobs of the DC and baseline solvers.
struct SolverOptions {
    double fd_step = 1e-6;
    double armijo_c = 1e-4;
    double grad_tol = 1e-9;
    double rel_improvement_tol = 1e-12;
    int max_bfgs_iterations = 500;

    double coarse_divisor = 8.0;   // coarse grid step = lambda_g / coarse_divisor
    double fine_divisor = 200.0;   // refined grid step = lambda_g / fine_divisor
    // Half-width, in units of dx_min, of the rigid-translation search run
    // after each coordinate sweep; 0 disables it.
    double block_shift_window = 1.0;

    double outer_tol = 1e-10;
    int max_outer_iterations = 50;
    int max_baseline_sweeps = 50;
};

struct IdealParams {
    std::vector<MatchedIdealPA> pas;
};

/// Coupler settings shared by the DC solver and the baseline (varphi = pi/2).
struct CouplerParams {
    std::vector<double> kappas;
    double varphi = kPi / 2.0;
};

using SolutionParams = std::variant<IdealParams, CouplerParams>;

struct Solution {
    PAModel model = PAModel::Ideal;
    std::vector<double> s;
    SolutionParams params;
    double gain = 0.0;
    std::vector<double> trace;
    std::size_t restarts_used = 0;
    std::uint64_t seed = 0;

    /// Per-PA (theta1, theta2) pairs the solution configures.
    std::vector<MatchedIdealPA> coefficients() const;
    /// Per-PA 3x3 scattering matrices, for the full cascade evaluators.
    std::vector<CMatrix> scattering() const;
};

/// Rigid block at minimum spacing, centred as close to the receiver as the
/// waveguide allows.
std::vector<double> ideal_optimal_positions(const ProblemSpec& spec);

/// The low-complexity fixed placement; coincides with the rigid block.
std::vector<double> heuristic_fixed_positions(const ProblemSpec& spec);

/// Phase- and amplitude-aligned matched PAs reaching |coefficient| = ||h||.
std::vector<MatchedIdealPA> ideal_optimal_scattering(std::span<const cplx> h_tr,
                                                     std::span<const double> s, double beta_g);

Solution ideal_solve(const ProblemSpec& spec);

/// Gain re-evaluated from a solution's positions and parameters through the
/// chain formula.
double evaluate_gain(const ProblemSpec& spec, const Solution& sol);

inline double kappa_from_psi(double psi) { return clamp_kappa(std::abs(std::tanh(psi))); }
std::vector<double> kappas_from_psi(std::span<const double> psi);

struct KappaResult {
    std::vector<double> psi;
    double gain = 0.0;                // raw channel gain at psi
    std::vector<double> trace;        // normalized objective per accepted step
};

/// Maximizes the DC chain gain over unconstrained psi (kappa = |tanh psi|) at
/// fixed positions with finite-difference BFGS and an Armijo ascent search.
KappaResult dc_kappa_subproblem(const ProblemSpec& spec, std::span<const double> s,
                                std::span<const double> psi0, const SolverOptions& opts = {});

/// Central finite-difference gradient over psi of the gain normalized by
/// sum |h_n|^2 at the given positions.
std::vector<double> psi_gradient(const ProblemSpec& spec, std::span<const double> s,
                                 std::span<const double> psi, double step = 1e-6);

/// One coordinate-ascent sweep over the PA abscissas with the per-PA
/// coefficients held fixed. Never lowers the gain.
std::vector<double> position_sweep(const ProblemSpec& spec, std::span<const MatchedIdealPA> coeffs,
                                   std::span<const double> s, const SolverOptions& opts = {});

std::vector<double> dc_position_subproblem(const ProblemSpec& spec, std::span<const double> kappas,
                                           std::span<const double> s, const SolverOptions& opts = {});

Solution dc_alternating_solve(const ProblemSpec& spec, std::size_t restarts, std::uint64_t seed,
                              const SolverOptions& opts = {});

Solution baseline_solve(const ProblemSpec& spec, const SolverOptions& opts = {});

/// Forces s into the feasible set: sorted, spacing >= dx_min, inside [0, x_max].
std::vector<double> project_feasible(std::vector<double> s, double dx_min, double x_max);

} // namespace pinchnet
