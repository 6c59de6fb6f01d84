#include "pinchnet/netcore.hpp"

#include "pinchnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace pinchnet {

CMatrix waveguide_scattering(double length, double beta_g) {
    if (length < 0.0) {
        throw InvalidArgument("waveguide_scattering: negative length");
    }
    if (!(beta_g > 0.0)) {
        throw InvalidArgument("waveguide_scattering: beta_g must be positive");
    }
    const cplx t = std::polar(1.0, -beta_g * length);
    return CMatrix{{0.0, t}, {t, 0.0}};
}

CMatrix impedance_to_scattering(const CMatrix& z, double z0) {
    if (!z.square()) {
        throw InvalidArgument("impedance_to_scattering: Z is not square");
    }
    if (!(z0 > 0.0)) {
        throw InvalidArgument("impedance_to_scattering: Z0 must be positive");
    }
    const CMatrix shift = CMatrix::identity(z.rows()) * cplx{z0};
    return solve_linear(z + shift, z - shift);
}

double spectral_norm(const CMatrix& a) {
    const std::size_t n = a.cols();
    if (n == 0 || a.max_abs() == 0.0) {
        return 0.0;
    }
    const CMatrix gram = a.adjoint() * a;

    // Uneven start so the iterate is not orthogonal to a symmetric dominant
    // subspace.
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = cplx{1.0 + 0.1 * static_cast<double>(i), 0.05 * static_cast<double>(i % 3)};
    }

    auto normalize = [](CVector& x) {
        double norm = 0.0;
        for (const auto& z : x) {
            norm += std::norm(z);
        }
        norm = std::sqrt(norm);
        for (auto& z : x) {
            z /= norm;
        }
        return norm;
    };

    normalize(v);
    double lambda = 0.0;
    constexpr int kMaxIterations = 10000;
    for (int it = 0; it < kMaxIterations; ++it) {
        CVector w = gram * std::span<const cplx>(v);
        cplx rayleigh{};
        for (std::size_t i = 0; i < n; ++i) {
            rayleigh += std::conj(v[i]) * w[i];
        }
        const double next = rayleigh.real();
        double wnorm = 0.0;
        for (const auto& z : w) {
            wnorm += std::norm(z);
        }
        if (wnorm == 0.0) {
            return 0.0;
        }
        if (it > 0 && std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
            return std::sqrt(std::max(next, 0.0));
        }
        lambda = next;
        normalize(w);
        v = std::move(w);
    }
    throw NonConvergence("spectral_norm: power iteration did not converge in 10000 iterations");
}

EnergyCheck check_energy_conservation(const CMatrix& theta, double tol) {
    if (!theta.square()) {
        throw InvalidArgument("check_energy_conservation: matrix is not square");
    }
    const double sigma = spectral_norm(theta);
    return {sigma <= 1.0 + tol, sigma};
}

PortPartition PortPartition::for_cascade(std::size_t n_pas) {
    PortPartition p;
    if (n_pas == 0) {
        return p;
    }
    p.external.push_back(flat_port(0, 0));
    for (std::size_t n = 0; n < n_pas; ++n) {
        p.external.push_back(flat_port(n, 2));
    }
    p.external.push_back(flat_port(n_pas - 1, 1));

    for (std::size_t n = 0; n + 1 < n_pas; ++n) {
        p.internal.push_back(flat_port(n, 1));
        p.internal.push_back(flat_port(n + 1, 0));
    }
    return p;
}

CMatrix cascade_external(std::span<const CMatrix> pa_matrices,
                         std::span<const double> segment_lengths, double beta_g) {
    const std::size_t n = pa_matrices.size();
    if (n == 0) {
        throw InvalidArgument("cascade_external: no PAs");
    }
    if (segment_lengths.size() != n - 1) {
        throw InvalidArgument("cascade_external: expected " + std::to_string(n - 1) +
                              " inter-PA segment lengths, got " +
                              std::to_string(segment_lengths.size()));
    }
    for (const auto& m : pa_matrices) {
        if (m.rows() != 3 || m.cols() != 3) {
            throw InvalidArgument("cascade_external: PA matrices must be 3x3");
        }
    }

    const CMatrix s = CMatrix::block_diagonal(pa_matrices);
    const PortPartition part = PortPartition::for_cascade(n);
    const CMatrix s_ee = s.select(part.external, part.external);
    if (n == 1) {
        return s_ee;
    }

    const CMatrix s_ei = s.select(part.external, part.internal);
    const CMatrix s_ie = s.select(part.internal, part.external);
    const CMatrix s_ii = s.select(part.internal, part.internal);

    std::vector<CMatrix> links;
    links.reserve(n - 1);
    for (const double x : segment_lengths) {
        if (!(x > 0.0)) {
            throw InvalidArgument("cascade_external: inter-PA segment lengths must be positive");
        }
        links.push_back(waveguide_scattering(x, beta_g));
    }
    const CMatrix t_i = CMatrix::block_diagonal(links);

    const CMatrix loop = CMatrix::identity(t_i.rows()) - t_i * s_ii;
    CMatrix internal_response;
    try {
        internal_response = solve_linear(loop, t_i * s_ie);
    } catch (const SingularMatrix& e) {
        std::ostringstream msg;
        msg << "cascade_external: resonant lossless loop, (I - T_I S_II) singular for N=" << n
            << ", beta_g=" << beta_g << ", segments=[";
        for (std::size_t i = 0; i < segment_lengths.size(); ++i) {
            msg << (i ? ", " : "") << segment_lengths[i];
        }
        msg << "] (" << e.what() << ")";
        throw SingularMatrix(msg.str());
    }
    return s_ee + s_ei * internal_response;
}

} // namespace pinchnet
