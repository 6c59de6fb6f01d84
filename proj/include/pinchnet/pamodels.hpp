#pragma once

#include "pinchnet/cmatrix.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace pinchnet {

/// Largest coupling coefficient used anywhere; kappa = 1 is outside the
/// physical open interval.
inline constexpr double kKappaMax = 1.0 - 1e-9;

inline double clamp_kappa(double kappa) { return kappa > kKappaMax ? kKappaMax : kappa; }

/// Directional-coupler PA: coupling coefficient and electrical coupling
/// length varphi = beta_c * x_c.
struct DCParams {
    double kappa = 0.0;
    double varphi = 0.0;

    void validate() const;
};

/// Matched three-port PA with freely chosen through (theta1) and
/// radiation (theta2) coefficients.
struct MatchedIdealPA {
    cplx theta1{};
    cplx theta2{};

    bool passive(double tol = 1e-12) const { return std::norm(theta1) + std::norm(theta2) <= 1.0 + tol; }
    CMatrix scattering() const;
};

struct FullIdealPA {
    CMatrix theta;

    /// Throws InvalidArgument unless theta is 3x3 and sigma_max <= 1 + 1e-10.
    void validate() const;
};

struct DCCoefficients {
    cplx theta1;
    cplx theta2;
};

DCCoefficients dc_coefficients(const DCParams& p);

/// Three-port S-matrix of a matched coupler with its isolated port dropped.
CMatrix dc_three_port(const DCParams& p);

/// Three-port S-matrix [[0,t1,t2],[t1,0,0],[t2,0,0]].
CMatrix matched_three_port(cplx theta1, cplx theta2);

struct AmpPhase {
    double amp1;
    double amp2;
    double phase1;  // radians
    double phase2;  // radians
};

/// Closed-form amplitudes and phases of the coupler coefficients.
AmpPhase dc_amp_phase(const DCParams& p);

struct PhaseSpan {
    double span;
    double lo;
    double hi;
};

/// Reachable range of the radiated phase when kappa sweeps [0, 1).
PhaseSpan acpc_phase_span(double varphi);

struct ModeCoupling {
    double kappa;
    bool matched;
};

ModeCoupling coupling_from_mode_impedances(double z0e, double z0o, double z0);

/// Amplitude-only coupling law under which PA n radiates 1/N of the input
/// power: kappa_n = sqrt(1/(N-n+1)), last entry clamped.
std::vector<double> equal_power_coupling(std::size_t n);

} // namespace pinchnet
