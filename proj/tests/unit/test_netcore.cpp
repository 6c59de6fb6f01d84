#include <doctest.h>

#include "approx.hpp"
#include "oracle.hpp"
#include "pinchnet/channel.hpp"
#include "pinchnet/error.hpp"
#include "pinchnet/netcore.hpp"
#include "pinchnet/pamodels.hpp"

#include <random>

using namespace pinchnet;

TEST_CASE("waveguide_scattering") {
    SUBCASE("zero length is a plain through") {
        const CMatrix t = waveguide_scattering(0.0, 10.0);
        CHECK(t(0, 0) == cplx{});
        CHECK(t(1, 1) == cplx{});
        CHECK(t(0, 1) == cplx{1.0});
        CHECK(t(1, 0) == cplx{1.0});
    }
    SUBCASE("half-period phase") {
        const CMatrix t = waveguide_scattering(kPi / 4.0, 4.0);
        CHECK(std::abs(t(0, 1) - cplx{-1.0}) < 1e-15);
    }
    SUBCASE("one guided wavelength at 15 GHz, n_g = 1.4") {
        const double lambda = wavelength_from_frequency(15e9);
        const double beta = guided_beta(lambda, 1.4);
        const CMatrix t = waveguide_scattering(lambda / 1.4, beta);
        CHECK(std::abs(t(0, 1) - cplx{1.0}) < 1e-12);
        CHECK(std::abs(t(1, 0) - cplx{1.0}) < 1e-12);
    }
    CHECK_THROWS_AS(waveguide_scattering(-1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(waveguide_scattering(1.0, 0.0), InvalidArgument);
}

TEST_CASE("impedance_to_scattering") {
    const double z0 = 50.0;
    CHECK(impedance_to_scattering(CMatrix::identity(3) * cplx{z0}, z0).max_abs() < 1e-15);

    const CMatrix half = impedance_to_scattering(CMatrix::identity(3) * cplx{3.0 * z0}, z0);
    CHECK((half - CMatrix::identity(3) * cplx{0.5}).max_abs() < 1e-15);

    const CMatrix shorted = impedance_to_scattering(CMatrix(3, 3), z0);
    CHECK((shorted + CMatrix::identity(3)).max_abs() < 1e-15);

    CHECK_THROWS_AS(impedance_to_scattering(CMatrix::identity(2) * cplx{-z0}, z0), SingularMatrix);
    CHECK_THROWS_AS(impedance_to_scattering(CMatrix::identity(2), 0.0), InvalidArgument);
}

TEST_CASE("impedance_to_scattering of a lossless reactive network is unitary") {
    // Purely imaginary symmetric Z gives a lossless reciprocal S.
    const CMatrix z{{cplx{0, 20}, cplx{0, 5}, cplx{0, -7}},
                    {cplx{0, 5}, cplx{0, -30}, cplx{0, 2}},
                    {cplx{0, -7}, cplx{0, 2}, cplx{0, 11}}};
    const CMatrix s = impedance_to_scattering(z, 50.0);
    CHECK((s.adjoint() * s - CMatrix::identity(3)).max_abs() < 1e-12);
    CHECK((s - s.transpose()).max_abs() < 1e-12);
}

TEST_CASE("check_energy_conservation") {
    auto r = check_energy_conservation(CMatrix::identity(3));
    CHECK(r.passive);
    CHECK(r.max_singular_value == rel(1.0, 1e-12));

    r = check_energy_conservation(CMatrix::identity(3) * cplx{1.1});
    CHECK_FALSE(r.passive);
    CHECK(r.max_singular_value == rel(1.1, 1e-12));

    r = check_energy_conservation(dc_three_port({0.6, kPi / 4.0}));
    CHECK(r.passive);
    CHECK(std::abs(r.max_singular_value - 1.0) < 1e-10);

    r = check_energy_conservation(CMatrix{{0.0, 0.3}, {0.0, 0.0}});
    CHECK(r.max_singular_value == rel(0.3, 1e-12));
    CHECK(check_energy_conservation(CMatrix(2, 2)).max_singular_value == 0.0);
}

TEST_CASE("PortPartition ordering for three PAs") {
    const auto p = PortPartition::for_cascade(3);
    // PA k port q -> 3k + q (zero-based)
    CHECK(p.external == std::vector<std::size_t>{0, 2, 5, 8, 7});
    CHECK(p.internal == std::vector<std::size_t>{1, 3, 4, 6});

    const auto single = PortPartition::for_cascade(1);
    CHECK(single.external == std::vector<std::size_t>{0, 2, 1});
    CHECK(single.internal.empty());
}

TEST_CASE("cascade_external, N = 1 is a port permutation") {
    std::mt19937_64 rng(2);
    const CMatrix theta = oracle::random_symmetric_unitary(rng);
    const CMatrix phi = cascade_external(std::span(&theta, 1), {}, 3.0);
    const std::size_t perm[] = {0, 2, 1};
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(phi(r, c) == theta(perm[r], perm[c]));
        }
    }
}

TEST_CASE("cascade_external, two matched DC PAs follow the unidirectional chain") {
    const double beta = 440.0;
    const double x1 = 0.37;
    const DCParams p1{0.3, kPi / 3.0};
    const DCParams p2{0.8, kPi / 3.0};
    const CMatrix pas[] = {dc_three_port(p1), dc_three_port(p2)};
    const double seg[] = {x1};
    const CMatrix phi = cascade_external(pas, seg, beta);

    const auto c1 = dc_coefficients(p1);
    const auto c2 = dc_coefficients(p2);
    // external rows: [a1(1), a3(1), a3(2), a2(2)]
    const cplx expected = c2.theta2 * c1.theta1 * std::polar(1.0, -beta * x1);
    CHECK(std::abs(phi(2, 0) - expected) < 1e-14);
    CHECK(std::abs(phi(1, 0) - c1.theta2) < 1e-14);
    CHECK(std::abs(phi(0, 0)) < 1e-15);
    CHECK(std::abs(phi(3, 0) - c2.theta1 * c1.theta1 * std::polar(1.0, -beta * x1)) < 1e-14);
}

TEST_CASE("cascade_external property: lossless, reciprocal blocks stay lossless and reciprocal") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> len(0.05, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + trial % 6;
        std::vector<CMatrix> pas;
        std::vector<double> seg;
        for (std::size_t k = 0; k < n; ++k) {
            pas.push_back(oracle::random_symmetric_unitary(rng));
            if (k + 1 < n) {
                seg.push_back(len(rng));
            }
        }
        const CMatrix phi = cascade_external(pas, seg, 440.0);
        REQUIRE(phi.rows() == n + 2);
        const auto check = check_energy_conservation(phi, 1e-9);
        CHECK(check.passive);
        CHECK((phi - phi.transpose()).max_abs() < 1e-10);
    }
}

TEST_CASE("cascade_external with transparent trailing PAs equals N = 1 plus through phase") {
    std::mt19937_64 rng(23);
    const CMatrix first = oracle::random_symmetric_unitary(rng);
    const CMatrix transparent = matched_three_port(1.0, 0.0);
    const double beta = 300.0;
    const std::vector<double> seg{0.4, 1.3, 0.25};
    const std::vector<CMatrix> pas{first, transparent, transparent, transparent};

    const CMatrix phi = cascade_external(pas, seg, beta);
    const CMatrix single = cascade_external(std::span(&first, 1), {}, beta);

    const cplx through = std::polar(1.0, -beta * (0.4 + 1.3 + 0.25));
    const cplx scale[] = {1.0, 1.0, through};
    const std::size_t rows[] = {0, 1, 5};
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(std::abs(phi(rows[r], rows[c]) - scale[r] * scale[c] * single(r, c)) < 1e-12);
        }
    }
    for (std::size_t k = 2; k <= 4; ++k) {
        for (std::size_t c = 0; c < 6; ++c) {
            CHECK(std::abs(phi(k, c)) < 1e-12);
        }
    }
}

TEST_CASE("cascade_external reports a resonant lossless loop") {
    const CMatrix reflect_port2 = CMatrix::diagonal(std::vector<cplx>{0.0, 1.0, 0.0});
    const CMatrix reflect_port1 = CMatrix::diagonal(std::vector<cplx>{1.0, 0.0, 0.0});
    const CMatrix pas[] = {reflect_port2, reflect_port1};
    const double beta = 2.0;
    const double seg[] = {kPi / beta};
    CHECK_THROWS_AS(cascade_external(pas, seg, beta), SingularMatrix);

    const double off[] = {0.3};
    CHECK_NOTHROW(cascade_external(pas, off, beta));
}

TEST_CASE("cascade_external argument checks") {
    const CMatrix pa = matched_three_port(1.0, 0.0);
    const CMatrix pas[] = {pa, pa};
    CHECK_THROWS_AS(cascade_external(pas, {}, 1.0), InvalidArgument);
    const double zero[] = {0.0};
    CHECK_THROWS_AS(cascade_external(pas, zero, 1.0), InvalidArgument);
    CHECK_THROWS_AS(cascade_external(std::span<const CMatrix>{}, {}, 1.0), InvalidArgument);
}
