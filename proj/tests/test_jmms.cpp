#include <doctest.h>

#include "fixtures.hpp"
#include "isolab/jmms.hpp"
#include "isolab/linalg.hpp"
#include "isolab/pvi.hpp"

using namespace isolab;

namespace {

CVector imag_u(std::initializer_list<double> im) {
    CVector u(static_cast<Eigen::Index>(im.size()));
    Eigen::Index k = 0;
    for (double v : im) u(k++) = cplx(0.0, v);
    return u;
}

CVector random_u(std::mt19937_64& g, int n) {
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    CVector u(n);
    for (int i = 0; i < n; ++i) u(i) = cplx(U(g) + 3.0 * i, U(g));
    return u;
}

}  // namespace

TEST_CASE("vector field: trivial cases") {
    std::mt19937_64 g(1);
    const CVector u = random_u(g, 3);
    const CMatrix D = CMatrix(CVector::Random(3).asDiagonal());
    for (int k = 0; k < 3; ++k) CHECK(max_abs(jmms_rhs(u, D, k)) == 0.0);
    const CMatrix P = fixtures::random_matrix(g, 3);
    for (int k = 0; k < 3; ++k) {
        const CMatrix R = jmms_rhs(u, P, k);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(R(i, i)) == 0.0);
    }
    CVector bad = u;
    bad(1) = bad(0);
    CHECK_THROWS_AS(jmms_rhs(bad, P, 0), DomainError);
    CHECK_THROWS_AS(require_off_diagonal({bad, P}), DomainError);
}

TEST_CASE("case-by-case field equals the commutator form") {
    std::mt19937_64 g(2);
    for (int n : {3, 4, 5}) {
        for (int rep = 0; rep < 20; ++rep) {
            const CVector u = random_u(g, n);
            const CMatrix P = fixtures::random_matrix(g, n);
            for (int k = 0; k < n; ++k) {
                const CMatrix a = jmms_rhs(u, P, k), b = jmms_rhs_commutator(u, P, k);
                CHECK(max_abs(a - b) < 1e-12 * std::max(1.0, max_abs(a)));
            }
        }
    }
}

TEST_CASE("flow conserves the spectrum and the diagonal") {
    std::mt19937_64 g(3);
    for (int n : {3, 4}) {
        const CVector u = random_u(g, n);
        const CMatrix P = fixtures::random_matrix(g, n, 0.5);
        const JmmsState s{u, P};
        const auto out = flow(s, n - 1, cplx(0.7, 0.4));
        CHECK(std::abs(out.u(n - 1) - (u(n - 1) + cplx(0.7, 0.4))) < 1e-15);
        CHECK(max_abs(CMatrix(out.phi.diagonal().asDiagonal()) - CMatrix(P.diagonal().asDiagonal())) < 1e-10);
        CHECK(spectral_distance(out.phi, P) < 1e-8);
        CHECK(max_abs(out.phi - P) > 1e-6);
    }
    const CMatrix D = CMatrix(imag_u({0.3, 0.1, -0.4}).asDiagonal());
    const auto st = flow({imag_u({0, 1, 3}), D}, 2, cplx(0.0, 2.0));
    CHECK(max_abs(st.phi - D) == 0.0);
}

TEST_CASE("flow stops at the fat diagonal") {
    std::mt19937_64 g(4);
    const JmmsState s{imag_u({0, 1, 3}), fixtures::random_matrix(g, 3)};
    CHECK_THROWS_AS(flow(s, 0, cplx(0.0, 2.0)), DomainError);
    CHECK_THROWS_AS(flow(s, 2, cplx(0.0, -2.0)), DomainError);
}

TEST_CASE("flow reproduces the PVI family") {
    const auto d = fixtures::reference();
    const CVector u0 = imag_u({0, 1, 3});
    const JmmsState s{u0, phi_at(d, u0)};
    // u3: 3i -> 5i moves x from 1/3 to 1/5.
    const auto out = flow(s, 2, cplx(0.0, 2.0));
    const CMatrix O = omega_at(d, 0.2);
    const cplx l = std::log(out.u(2) - out.u(0));
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            worst = std::max(worst, std::abs(std::exp((out.phi(i, i) - out.phi(j, j)) * l) * out.phi(i, j) - O(i, j)));
    CHECK(worst < 1e-6);
    // Moving u2 instead: x = 2/3 is also on the family.
    const auto o2 = flow(s, 1, cplx(0.0, 1.0));
    const CMatrix O2 = omega_at(d, 2.0 / 3.0);
    CHECK(std::abs(std::exp((o2.phi(0, 0) - o2.phi(1, 1)) * std::log(cplx(0.0, 3.0))) * o2.phi(0, 1) - O2(0, 1)) <
          1e-6);
}

TEST_CASE("flows in different directions commute") {
    std::mt19937_64 g(5);
    const JmmsState s{imag_u({0, 1, 3, 6}), fixtures::random_matrix(g, 4, 0.5)};
    for (double h : {0.2, 0.1}) {
        const cplx a(0.0, h), b(h, 0.5 * h);
        const auto p = flow(flow(s, 1, a), 3, b);
        const auto q = flow(flow(s, 3, b), 1, a);
        CHECK(max_abs(p.phi - q.phi) < 1e-9);
    }
}

TEST_CASE("shrinking band") {
    CMatrix Dg = CMatrix::Zero(3, 3);
    Dg(0, 0) = 0.8;
    Dg(1, 1) = 0.1;
    Dg(2, 2) = -0.3;
    const auto rd = shrinking_check({imag_u({0, 1, 3}), Dg}, 0.0, {1e1, 1e3});
    REQUIRE(rd.complete);
    for (const auto& b : rd.samples) CHECK(std::abs(b.band - 0.7) < 1e-14);

    std::mt19937_64 g(6);
    CMatrix S = fixtures::random_matrix(g, 4);
    S *= 0.19 / S.norm();
    const auto r4 = shrinking_check({imag_u({0, 1, 2, 4}), S}, cplx(0.0, 1.0), {1e1, 1e2, 1e4});
    REQUIRE(r4.complete);
    for (const auto& b : r4.samples) CHECK(b.band < 1.0);

    // Family point: the band approaches Re sigma.
    const auto d = fixtures::reference();
    const CVector u0 = imag_u({0, 1, 3});
    const auto rf = shrinking_check({u0, phi_at(d, u0)}, 0.0, {1e2, 1e4, 1e6});
    REQUIRE(rf.complete);
    CHECK(std::abs(rf.samples.back().band - d.sigma.real()) < 1e-3);
    CHECK(std::abs(rf.samples.back().band - 0.37) < std::abs(rf.samples.front().band - 0.37) + 1e-12);
}

TEST_CASE("block band and spectral distance") {
    CMatrix A = CMatrix::Zero(3, 3);
    A(0, 0) = cplx(0.5, 2.0);
    A(1, 1) = cplx(-0.2, 1.0);
    A(0, 1) = 0.0;
    CHECK(std::abs(block_band(A, 2) - 0.7) < 1e-14);
    CMatrix B = A;
    B(2, 2) = 1e-3;
    CHECK(std::abs(spectral_distance(A, B) - 1e-3) < 1e-12);
}
