#include "pinchnet/pamodels.hpp"

#include "pinchnet/channel.hpp"
#include "pinchnet/error.hpp"
#include "pinchnet/netcore.hpp"

#include <cmath>

namespace pinchnet {

void DCParams::validate() const {
    if (!(kappa >= 0.0 && kappa < 1.0)) {
        throw InvalidArgument("DCParams: kappa must lie in [0, 1)");
    }
    if (!(varphi > 0.0 && varphi < kPi)) {
        throw InvalidArgument("DCParams: varphi must lie in (0, pi)");
    }
}

CMatrix MatchedIdealPA::scattering() const { return matched_three_port(theta1, theta2); }

void FullIdealPA::validate() const {
    if (theta.rows() != 3 || theta.cols() != 3) {
        throw InvalidArgument("FullIdealPA: scattering matrix must be 3x3");
    }
    if (!check_energy_conservation(theta, 1e-10).passive) {
        throw InvalidArgument("FullIdealPA: scattering matrix is not passive");
    }
}

DCCoefficients dc_coefficients(const DCParams& p) {
    p.validate();
    const double kappa = clamp_kappa(p.kappa);
    const double root = std::sqrt(1.0 - kappa * kappa);
    const cplx denom{root * std::cos(p.varphi), std::sin(p.varphi)};
    return {root / denom, kJ * (kappa * std::sin(p.varphi)) / denom};
}

CMatrix matched_three_port(cplx theta1, cplx theta2) {
    return CMatrix{{0.0, theta1, theta2}, {theta1, 0.0, 0.0}, {theta2, 0.0, 0.0}};
}

CMatrix dc_three_port(const DCParams& p) {
    const auto c = dc_coefficients(p);
    return matched_three_port(c.theta1, c.theta2);
}

AmpPhase dc_amp_phase(const DCParams& p) {
    p.validate();
    const double kappa = clamp_kappa(p.kappa);
    const double k2 = kappa * kappa;
    const double cos_phi = std::cos(p.varphi);
    const double sin_phi = std::sin(p.varphi);
    const double root = std::sqrt(1.0 - k2);
    const double denom = 1.0 - k2 * cos_phi * cos_phi;

    AmpPhase out{};
    out.amp1 = std::sqrt((1.0 - k2) / denom);
    out.amp2 = std::sqrt(k2 * sin_phi * sin_phi / denom);
    // atan(root/tan(phi)) is the true argument of theta2 on all of (0, pi);
    // theta1 trails it by exactly pi/2. The atan(-tan(phi)/root) form for
    // theta1 is only on the right branch for phi < pi/2.
    out.phase2 = std::atan(root * cos_phi / sin_phi);
    out.phase1 = out.phase2 - kPi / 2.0;
    return out;
}

PhaseSpan acpc_phase_span(double varphi) {
    if (!(varphi > 0.0 && varphi < kPi)) {
        throw InvalidArgument("acpc_phase_span: varphi must lie in (0, pi)");
    }
    const double edge = kPi / 2.0 - varphi;
    if (edge >= 0.0) {
        return {edge, 0.0, edge};
    }
    return {-edge, edge, 0.0};
}

ModeCoupling coupling_from_mode_impedances(double z0e, double z0o, double z0) {
    if (!(z0e > 0.0 && z0o > 0.0 && z0 > 0.0)) {
        throw InvalidArgument("coupling_from_mode_impedances: impedances must be positive");
    }
    if (z0e < z0o) {
        throw InvalidArgument("coupling_from_mode_impedances: even-mode impedance below odd-mode");
    }
    const double kappa = (z0e - z0o) / (z0e + z0o);
    const bool matched = std::abs(z0e * z0o - z0 * z0) <= 1e-9 * z0 * z0;
    return {kappa, matched};
}

std::vector<double> equal_power_coupling(std::size_t n) {
    if (n == 0) {
        throw InvalidArgument("equal_power_coupling: need at least one PA");
    }
    std::vector<double> kappa(n);
    for (std::size_t i = 0; i < n; ++i) {
        kappa[i] = clamp_kappa(std::sqrt(1.0 / static_cast<double>(n - i)));
    }
    return kappa;
}

} // namespace pinchnet
