#pragma once

// Multiport scattering primitives: the waveguide two-port, Z-to-S
// conversion, the passivity test and the reduction of N cascaded
// three-port PAs to a single (N+2)-port network.

#include "pinchnet/cmatrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pinchnet {

/// 2x2 S-matrix of a lossless waveguide segment.
CMatrix waveguide_scattering(double length, double beta_g);

/// (Z + Z0 I)^-1 (Z - Z0 I).
CMatrix impedance_to_scattering(const CMatrix& z, double z0);

struct EnergyCheck {
    bool passive = false;
    double max_singular_value = 0.0;
};

/// Passivity test Theta^H Theta <= I, i.e. sigma_max(Theta) <= 1 + tol.
/// sigma_max comes from power iteration on Theta^H Theta.
EnergyCheck check_energy_conservation(const CMatrix& theta, double tol = 1e-10);

/// Largest singular value by power iteration on A^H A (relative convergence
/// 1e-12, at most 10000 iterations). Throws NonConvergence otherwise.
double spectral_norm(const CMatrix& a);

/// Flat port index of (PA n, port p), both zero-based, in the stacked 3N-port system.
constexpr std::size_t flat_port(std::size_t pa, std::size_t port) noexcept { return 3 * pa + port; }

/// Split of the 3N stacked PA ports into the N+2 external ports
/// [p1 of PA1, p3 of PA1, p3 of PA2, ..., p3 of PA N, p2 of PA N] and the
/// 2(N-1) internal ports [p2 of PA1, p1 of PA2, p2 of PA2, ..., p1 of PA N].
///
/// External row/column k = 1..N is the radiation port of PA k; every
/// indexing of g_TR, Sigma and phi_T in the system module derives from this.
struct PortPartition {
    std::vector<std::size_t> external;
    std::vector<std::size_t> internal;

    static PortPartition for_cascade(std::size_t n_pas);
};

/// Phi = S_EE + S_EI (I - T_I S_II)^-1 T_I S_IE for PAs joined by waveguide
/// segments x_1..x_{N-1}. For N = 1 this is the PA matrix permuted into the
/// external order (p1, p3, p2).
CMatrix cascade_external(std::span<const CMatrix> pa_matrices,
                         std::span<const double> segment_lengths, double beta_g);

} // namespace pinchnet
