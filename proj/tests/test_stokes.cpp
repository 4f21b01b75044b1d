#include <doctest.h>

#include "fixtures.hpp"
#include "isolab/linalg.hpp"
#include "isolab/pvi.hpp"
#include "isolab/special.hpp"
#include "isolab/stokes.hpp"

using namespace isolab;

namespace {

IrregularSystem reference_system() {
    const CVector u = default_u();
    return {u, phi_at(fixtures::reference(), u)};
}

CMatrix diag_of(std::initializer_list<cplx> v) {
    CVector d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (cplx z : v) d(k++) = z;
    return d.asDiagonal();
}

}  // namespace

TEST_CASE("zero and diagonal Phi") {
    const CVector u = default_u();
    const IrregularSystem zero{u, CMatrix::Zero(3, 3)};
    const auto f = canonical_frame(zero, Sector::plus);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(f.frame(i, j) == (i == j ? std::exp(u(i) * f.z0) : cplx(0.0)));
    const auto s0 = compute_stokes(zero);
    CHECK(max_abs(s0.stokes.s_plus - CMatrix::Identity(3, 3)) < 1e-9);
    CHECK(max_abs(s0.stokes.s_minus - CMatrix::Identity(3, 3)) < 1e-9);

    const IrregularSystem dg{u, diag_of({cplx(0.3, 0.1), -0.2, cplx(0.45, -0.2)})};
    const auto fm = canonical_frame(dg, Sector::minus);
    const cplx lz = branched_log(fm.z0, LogBranch::nonneg_imaginary_cut);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(fm.frame(i, i) - std::exp(dg.phi(i, i) * lz + u(i) * fm.z0)) < 1e-15);
    const auto sd = compute_stokes(dg);
    for (int i = 0; i < 3; ++i) {
        const cplx e = std::exp(-kI * kPi * dg.phi(i, i));
        CHECK(std::abs(sd.stokes.s_plus(i, i) - e) < 1e-8);
        CHECK(std::abs(sd.stokes.s_minus(i, i) - e) < 1e-8);
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            CHECK(std::abs(sd.stokes.s_plus(i, j)) < 1e-10);
            CHECK(std::abs(sd.stokes.s_minus(i, j)) < 1e-10);
        }
    }
}

TEST_CASE("formal series") {
    std::mt19937_64 g(11);
    const IrregularSystem sys{default_u(), fixtures::random_matrix(g, 3, 0.5)};
    const auto Y = formal_series(sys, 3);
    REQUIRE(Y.size() == 4);
    CHECK(max_abs(Y[0] - CMatrix::Identity(3, 3)) == 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(std::abs(Y[1](i, j) + sys.phi(i, j) / (sys.u(i) - sys.u(j))) < 1e-15);
    const IrregularSystem dg{default_u(), diag_of({0.3, 0.1, -0.2})};
    const auto Yd = formal_series(dg, 5);
    for (std::size_t k = 1; k < Yd.size(); ++k) CHECK(max_abs(Yd[k]) == 0.0);
}

TEST_CASE("input validation") {
    std::mt19937_64 g(12);
    const CMatrix P = fixtures::random_matrix(g, 3, 0.3);
    CVector u = default_u();
    u(1) = cplx(0.1, 1.0);
    CHECK_THROWS_AS(validate_system({u, P}), DomainError);
    u = default_u();
    std::swap(u(1), u(2));
    CHECK_THROWS_AS(validate_system({u, P}), DomainError);
    CMatrix R = P;
    R(0, 0) = R(2, 2) + 1.0;
    CHECK_THROWS_AS(validate_system({default_u(), R}), DomainError);
    CHECK_THROWS_AS(compute_stokes({default_u(), R}), DomainError);
    StokesOptions tiny;
    tiny.R = 5.0;
    CHECK_THROWS_AS(canonical_frame({default_u(), P * 10.0}, Sector::plus, tiny), AccuracyError);
}

TEST_CASE("reference point against the closed form") {
    const auto sys = reference_system();
    const auto ns = compute_stokes(sys, {}, true);
    CHECK(max_abs(ns.stokes.s_plus - fixtures::reference_s_plus()) < 1e-6);
    CHECK(max_abs(ns.stokes.s_minus - fixtures::reference_s_minus()) < 1e-6);
    CHECK(ns.triangular_residual < 1e-6);
    CHECK(ns.diagonal_residual < 1e-8);
    CHECK(ns.monodromy_residual >= 0.0);
    CHECK(ns.monodromy_residual < 1e-6);
}

TEST_CASE("independence of R and tolerance") {
    const auto sys = reference_system();
    const auto base = compute_stokes(sys);
    StokesOptions big;
    big.R = 80.0;
    const auto r2 = compute_stokes(sys, big);
    CHECK(max_abs(r2.stokes.s_plus - base.stokes.s_plus) < 1e-7);
    CHECK(max_abs(r2.stokes.s_minus - base.stokes.s_minus) < 1e-7);
    StokesOptions loose;
    loose.rtol = 1e-11;
    loose.atol = 1e-13;
    const auto t2 = compute_stokes(sys, loose);
    CHECK(max_abs(t2.stokes.s_plus - base.stokes.s_plus) < 1e-6);
    StokesOptions keyhole;
    keyhole.r = 0.5;
    keyhole.arc_segments = 128;
    const auto k2 = compute_stokes(sys, keyhole);
    CHECK(max_abs(k2.stokes.s_minus - base.stokes.s_minus) < 1e-7);
}

TEST_CASE("rescaling u") {
    // F(cz) c^{-dPhi} is canonical for (c u, Phi), so S -> c^{dPhi} S c^{-dPhi}.
    std::mt19937_64 g(13);
    const CMatrix P = fixtures::random_matrix(g, 3, 0.4);
    const auto a = compute_stokes({default_u(), P});
    const double c = 2.0;
    const auto b = compute_stokes({c * default_u(), P});
    CVector cp(3), cm(3);
    for (int i = 0; i < 3; ++i) {
        cp(i) = std::pow(c, P(i, i));
        cm(i) = 1.0 / cp(i);
    }
    const CMatrix sp = cp.asDiagonal() * a.stokes.s_plus * cm.asDiagonal();
    const CMatrix sm = cp.asDiagonal() * a.stokes.s_minus * cm.asDiagonal();
    CHECK(max_abs(b.stokes.s_plus - sp) < 1e-7);
    CHECK(max_abs(b.stokes.s_minus - sm) < 1e-7);
}

TEST_CASE("frames in the wrong order") {
    const auto sys = reference_system();
    const auto fp = canonical_frame(sys, Sector::plus);
    const auto fm = canonical_frame(sys, Sector::minus);
    CHECK_THROWS_AS(stokes_from_frames(sys, fm, fp), DomainError);
    StokesOptions bad;
    bad.r = 100.0;
    CHECK_THROWS_AS(stokes_from_frames(sys, fp, fm, bad), ConfigError);
}
