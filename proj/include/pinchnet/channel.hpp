#pragma once

#include "pinchnet/cmatrix.hpp"

#include <span>
#include <vector>

namespace pinchnet {

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kPi = 3.14159265358979323846;

inline double wavelength_from_frequency(double frequency_hz) { return kSpeedOfLight / frequency_hz; }

/// In-waveguide propagation constant 2*pi*n_g/lambda.
inline double guided_beta(double lambda, double n_g) { return 2.0 * kPi * n_g / lambda; }

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Waveguide runs along x at (y_g, z_g) over [0, x_max].
struct Geometry {
    double y_g = 0.0;
    double z_g = 3.0;
    Point3 receiver{15.0, 0.0, 0.0};
    double x_max = 30.0;

    /// Squared transverse offset of the receiver from the waveguide axis.
    double xi() const {
        const double dy = y_g - receiver.y;
        const double dz = z_g - receiver.z;
        return dy * dy + dz * dz;
    }

    /// Throws InvalidArgument when x_max <= 0 or the receiver sits on the axis.
    void validate() const;
};

struct PathlossModel {
    enum class Kind { FreeSpace, PowerLaw };

    Kind kind = Kind::FreeSpace;
    // PowerLaw only: |h|^2 = c0 * (d / d0)^-alpha
    double c0 = 0.0;
    double d0 = 1.0;
    double alpha = 1.0;

    static PathlossModel free_space() { return {}; }
    static PathlossModel power_law(double c0_linear, double d0, double alpha);

    void validate() const;
};

/// Wireless-side scattering description seen by the PA radiation ports.
/// Matched means every reflection and coupling term is zero.
struct ChannelState {
    CVector h_tr;
    CMatrix h_tt;   // N x N reflection / mutual coupling among PA radiation ports
    cplx h_rr{};
    cplx gamma_t{};
    cplx gamma_r{};
    cplx gamma_l{};

    static ChannelState matched(CVector h_tr);

    bool is_matched() const;
    void validate() const;
};

/// s_n = x_0 + ... + x_{n-1}, one abscissa per supplied segment.
std::vector<double> pa_abscissas(std::span<const double> segments);

/// Inverse of pa_abscissas: x_0 = s_1, x_n = s_{n+1} - s_n.
std::vector<double> segments_from_abscissas(std::span<const double> s);

/// Distance from a PA at abscissa s_n to the receiver.
double distance(double s_n, const Geometry& geom);

/// Channel coefficient for one distance: amplitude from the pathloss
/// model, phase -2*pi*d/lambda.
cplx channel_coefficient(double d, double lambda, const PathlossModel& model);

CVector channel_vector(std::span<const double> s, const Geometry& geom, double lambda,
                       const PathlossModel& model);

} // namespace pinchnet
