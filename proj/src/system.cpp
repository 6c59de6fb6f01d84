#include "pinchnet/system.hpp"

#include "pinchnet/error.hpp"
#include "pinchnet/netcore.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace pinchnet {

namespace {

constexpr double kDenominatorFloor = 1e-300;

cplx receiver_loop(const ChannelState& ch) {
    const cplx loop = 1.0 - ch.h_rr * ch.gamma_r;
    if (std::abs(loop) < kDenominatorFloor) {
        throw DivisionByZero("receiver loop 1 - h_RR Gamma_R vanishes");
    }
    return loop;
}

} // namespace

std::vector<double> SystemLayout::abscissas() const {
    if (segments.empty()) {
        return {};
    }
    return pa_abscissas(std::span<const double>(segments).first(segments.size() - 1));
}

CVector SystemLayout::channel() const { return channel_vector(abscissas(), geom, lambda, model); }

void SystemLayout::validate() const {
    if (segments.size() < 2) {
        throw InvalidArgument("SystemLayout: need x_0..x_N for at least one PA");
    }
    if (!(beta_g > 0.0) || !(lambda > 0.0)) {
        throw InvalidArgument("SystemLayout: beta_g and lambda must be positive");
    }
    double total = 0.0;
    for (const double x : segments) {
        if (x < 0.0) {
            throw InvalidArgument("SystemLayout: negative segment length");
        }
        total += x;
    }
    if (total > geom.x_max * (1.0 + 1e-12)) {
        throw InvalidArgument("SystemLayout: segments exceed x_max");
    }
    geom.validate();
    model.validate();
}

SystemLayout SystemLayout::from_abscissas(std::span<const double> s, double beta_g,
                                          const Geometry& geom, double lambda,
                                          const PathlossModel& model) {
    SystemLayout layout;
    layout.beta_g = beta_g;
    layout.geom = geom;
    layout.lambda = lambda;
    layout.model = model;
    layout.segments = segments_from_abscissas(s);
    const double last = s.empty() ? 0.0 : s.back();
    layout.segments.push_back(std::max(geom.x_max - last, 0.0));
    return layout;
}

cplx e2e_single_general(const CMatrix& theta, const ChannelState& ch, double x0, double x1,
                        double beta_g) {
    if (theta.rows() != 3 || theta.cols() != 3) {
        throw InvalidArgument("e2e_single_general: PA matrix must be 3x3");
    }
    if (ch.h_tr.size() != 1) {
        throw InvalidArgument("e2e_single_general: channel must describe exactly one PA");
    }
    ch.validate();

    const cplx h = ch.h_tr[0];
    const cplx loop = receiver_loop(ch);
    const cplx feed = std::polar(1.0, -beta_g * x0);
    const cplx feed2 = feed * feed;

    const cplx g[3] = {feed2 * ch.gamma_t, std::polar(1.0, -2.0 * beta_g * x1) * ch.gamma_l,
                       ch.h_tt(0, 0) + h * h * ch.gamma_r / loop};
    const CMatrix gamma = CMatrix::diagonal(g);

    const cplx e1[3] = {1.0, 0.0, 0.0};
    const CVector a = solve_linear(CMatrix::identity(3) - gamma * theta, e1);
    const CVector b = theta * std::span<const cplx>(a);

    const cplx numerator = feed * (1.0 + ch.gamma_r) * h * b[2];
    const cplx denominator = loop * (a[0] + feed2 * b[0]);
    if (std::abs(denominator) < kDenominatorFloor) {
        throw DivisionByZero("e2e_single_general: transmit voltage vanishes");
    }
    return numerator / denominator;
}

cplx e2e_multi_general(std::span<const CMatrix> pas, const SystemLayout& layout,
                       const ChannelState& ch) {
    const std::size_t n = pas.size();
    if (n == 0 || layout.num_pas() != n) {
        throw InvalidArgument("e2e_multi_general: layout does not match PA count");
    }
    if (ch.h_tr.size() != n) {
        throw InvalidArgument("e2e_multi_general: h_TR length differs from PA count");
    }
    ch.validate();

    const auto& x = layout.segments;
    const CMatrix phi = cascade_external(pas, std::span<const double>(x).subspan(1, n - 1), layout.beta_g);

    const cplx loop = receiver_loop(ch);
    const cplx feed = std::polar(1.0, -layout.beta_g * x.front());
    const cplx feed2 = feed * feed;

    const std::size_t m = n + 2;
    CMatrix sigma(m, m);
    sigma(0, 0) = feed2 * ch.gamma_t;
    sigma(m - 1, m - 1) = std::polar(1.0, -2.0 * layout.beta_g * x.back()) * ch.gamma_l;
    const cplx coupling = ch.gamma_r / loop;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            sigma(r + 1, c + 1) = ch.h_tt(r, c) + ch.h_tr[r] * ch.h_tr[c] * coupling;
        }
    }

    CVector u1(m);
    u1[0] = 1.0;
    const CVector a = solve_linear(CMatrix::identity(m) - sigma * phi, u1);
    const CVector b = phi * std::span<const cplx>(a);

    cplx radiated{};
    for (std::size_t k = 0; k < n; ++k) {
        radiated += ch.h_tr[k] * b[k + 1];
    }
    const cplx numerator = feed * (1.0 + ch.gamma_r) * radiated;
    const cplx denominator = loop * (a[0] + feed2 * b[0]);
    if (std::abs(denominator) < kDenominatorFloor) {
        throw DivisionByZero("e2e_multi_general: transmit voltage vanishes");
    }
    return numerator / denominator;
}

cplx e2e_multi_matched(std::span<const CMatrix> pas, const SystemLayout& layout,
                       std::span<const cplx> h_tr) {
    const std::size_t n = pas.size();
    if (n == 0 || layout.num_pas() != n || h_tr.size() != n) {
        throw InvalidArgument("e2e_multi_matched: PA count, layout and h_TR disagree");
    }
    const auto& x = layout.segments;
    const CMatrix phi = cascade_external(pas, std::span<const double>(x).subspan(1, n - 1), layout.beta_g);

    cplx transmitted{};
    for (std::size_t k = 0; k < n; ++k) {
        transmitted += h_tr[k] * phi(k + 1, 0);
    }
    const cplx feed = std::polar(1.0, -layout.beta_g * x.front());
    const cplx denominator = 1.0 + feed * feed * phi(0, 0);
    if (std::abs(denominator) < kDenominatorFloor) {
        throw DivisionByZero("e2e_multi_matched: 1 + e^{-2j beta_g x0} phi_R vanishes");
    }
    return feed * transmitted / denominator;
}

cplx matched_chain_coefficient(std::span<const MatchedIdealPA> pas, std::span<const double> s,
                               std::span<const cplx> h_tr, double beta_g) {
    if (pas.size() != s.size() || pas.size() != h_tr.size()) {
        throw InvalidArgument("matched_chain_coefficient: length mismatch");
    }
    cplx total{};
    cplx through = 1.0;
    for (std::size_t n = 0; n < pas.size(); ++n) {
        total += h_tr[n] * pas[n].theta2 * through * std::polar(1.0, -beta_g * s[n]);
        through *= pas[n].theta1;
    }
    return total;
}

cplx dc_chain_coefficient(std::span<const double> kappas, std::span<const double> s,
                          std::span<const cplx> h_tr, double beta_g, double varphi) {
    if (kappas.size() != s.size() || kappas.size() != h_tr.size()) {
        throw InvalidArgument("dc_chain_coefficient: length mismatch");
    }
    cplx total{};
    cplx through = 1.0;
    for (std::size_t n = 0; n < kappas.size(); ++n) {
        const auto c = dc_coefficients({kappas[n], varphi});
        total += h_tr[n] * c.theta2 * through * std::polar(1.0, -beta_g * s[n]);
        through *= c.theta1;
    }
    return total;
}

cplx dc_chain_gain(std::span<const double> kappas, const SystemLayout& layout,
                   std::span<const cplx> h_tr, double varphi) {
    if (layout.num_pas() != kappas.size()) {
        throw InvalidArgument("dc_chain_gain: layout does not match kappa count");
    }
    const auto s = layout.abscissas();
    return dc_chain_coefficient(kappas, s, h_tr, layout.beta_g, varphi);
}

} // namespace pinchnet
