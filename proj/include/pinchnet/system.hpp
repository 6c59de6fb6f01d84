#pragma once

// End-to-end transmit-to-receive voltage ratios. The general evaluators
// carry every mismatch term; the matched and chain forms are the
// reflection-free special cases used by the optimizers.

#include "pinchnet/channel.hpp"
#include "pinchnet/cmatrix.hpp"
#include "pinchnet/pamodels.hpp"

#include <span>
#include <vector>

namespace pinchnet {

struct SystemLayout {
    double beta_g = 0.0;
    std::vector<double> segments;  // x_0 (feed to PA 1) .. x_N (PA N to termination)
    Geometry geom;
    double lambda = 0.0;
    PathlossModel model;

    std::size_t num_pas() const { return segments.empty() ? 0 : segments.size() - 1; }
    /// PA abscissas s_1..s_N.
    std::vector<double> abscissas() const;
    /// Free-space (or power-law) transmission vector at the PA abscissas.
    CVector channel() const;

    void validate() const;

    /// Layout whose PAs sit at the given abscissas; the tail segment runs to x_max.
    static SystemLayout from_abscissas(std::span<const double> s, double beta_g, const Geometry& geom,
                                       double lambda, const PathlossModel& model);
};

struct GainResult {
    cplx ratio{};
    double gain = 0.0;

    static GainResult of(cplx ratio) { return {ratio, std::norm(ratio)}; }
};

inline double channel_gain(cplx coefficient) { return std::norm(coefficient); }

/// v_R / v_T for one PA with arbitrary mismatches. x0 and x1 are the feed
/// and termination segment lengths.
cplx e2e_single_general(const CMatrix& theta, const ChannelState& ch, double x0, double x1,
                        double beta_g);

/// v_R / v_T for N cascaded PAs with arbitrary mismatches and coupling.
cplx e2e_multi_general(std::span<const CMatrix> pas, const SystemLayout& layout,
                       const ChannelState& ch);

/// Matched, coupling-free special case e^{-j b x0} h^T phi_T / (1 + e^{-2j b x0} phi_R).
cplx e2e_multi_matched(std::span<const CMatrix> pas, const SystemLayout& layout,
                       std::span<const cplx> h_tr);

/// Unidirectional chain sum over matched PAs:
/// sum_n h_n theta2_n prod_{i<n} theta1_i e^{-j beta_g s_n}.
cplx matched_chain_coefficient(std::span<const MatchedIdealPA> pas, std::span<const double> s,
                               std::span<const cplx> h_tr, double beta_g);

/// Chain sum for DC PAs with coupling coefficients kappas. O(N).
cplx dc_chain_gain(std::span<const double> kappas, const SystemLayout& layout,
                   std::span<const cplx> h_tr, double varphi);

/// Same sum for PAs at explicit abscissas.
cplx dc_chain_coefficient(std::span<const double> kappas, std::span<const double> s,
                          std::span<const cplx> h_tr, double beta_g, double varphi);

} // namespace pinchnet
