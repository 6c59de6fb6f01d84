#include "pinchnet/channel.hpp"

#include "pinchnet/error.hpp"

#include <cmath>
#include <string>

namespace pinchnet {

void Geometry::validate() const {
    if (!(x_max > 0.0)) {
        throw InvalidArgument("Geometry: x_max must be positive");
    }
    if (!(xi() > 0.0)) {
        throw InvalidArgument("Geometry: receiver lies on the waveguide axis");
    }
}

PathlossModel PathlossModel::power_law(double c0_linear, double d0, double alpha) {
    PathlossModel m;
    m.kind = Kind::PowerLaw;
    m.c0 = c0_linear;
    m.d0 = d0;
    m.alpha = alpha;
    m.validate();
    return m;
}

void PathlossModel::validate() const {
    if (kind == Kind::PowerLaw && !(c0 > 0.0 && d0 > 0.0 && alpha > 0.0)) {
        throw InvalidArgument("PathlossModel: power law needs c0, d0, alpha > 0");
    }
}

ChannelState ChannelState::matched(CVector h_tr) {
    ChannelState ch;
    const std::size_t n = h_tr.size();
    ch.h_tr = std::move(h_tr);
    ch.h_tt = CMatrix(n, n);
    return ch;
}

bool ChannelState::is_matched() const {
    return gamma_t == cplx{} && gamma_r == cplx{} && gamma_l == cplx{} && h_rr == cplx{} &&
           h_tt.max_abs() == 0.0;
}

void ChannelState::validate() const {
    if (h_tt.rows() != h_tr.size() || h_tt.cols() != h_tr.size()) {
        throw InvalidArgument("ChannelState: H_TT must be N x N with N = len(h_TR)");
    }
    constexpr double slack = 1e-12;
    if (std::abs(gamma_t) > 1.0 + slack || std::abs(gamma_r) > 1.0 + slack ||
        std::abs(gamma_l) > 1.0 + slack) {
        throw InvalidArgument("ChannelState: reflection coefficient magnitude exceeds 1");
    }
}

std::vector<double> pa_abscissas(std::span<const double> segments) {
    std::vector<double> s;
    s.reserve(segments.size());
    double acc = 0.0;
    for (const double x : segments) {
        if (x < 0.0) {
            throw InvalidArgument("pa_abscissas: negative segment length");
        }
        acc += x;
        s.push_back(acc);
    }
    return s;
}

std::vector<double> segments_from_abscissas(std::span<const double> s) {
    std::vector<double> x;
    x.reserve(s.size());
    double prev = 0.0;
    for (const double v : s) {
        x.push_back(v - prev);
        prev = v;
    }
    return x;
}

double distance(double s_n, const Geometry& geom) {
    const double dx = s_n - geom.receiver.x;
    return std::sqrt(dx * dx + geom.xi());
}

cplx channel_coefficient(double d, double lambda, const PathlossModel& model) {
    double amplitude = 0.0;
    switch (model.kind) {
    case PathlossModel::Kind::FreeSpace:
        amplitude = lambda / (4.0 * kPi * d);
        break;
    case PathlossModel::Kind::PowerLaw:
        amplitude = std::sqrt(model.c0) * std::pow(d / model.d0, -0.5 * model.alpha);
        break;
    }
    return std::polar(amplitude, -2.0 * kPi * d / lambda);
}

CVector channel_vector(std::span<const double> s, const Geometry& geom, double lambda,
                       const PathlossModel& model) {
    if (!(lambda > 0.0)) {
        throw InvalidArgument("channel_vector: wavelength must be positive");
    }
    CVector h;
    h.reserve(s.size());
    for (const double sn : s) {
        h.push_back(channel_coefficient(distance(sn, geom), lambda, model));
    }
    return h;
}

} // namespace pinchnet
