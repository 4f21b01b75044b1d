#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "isolab/linalg.hpp"
#include "isolab/pvi.hpp"

using namespace isolab;

TEST_CASE("PVI right-hand side by hand") {
    const Thetas th{0.0, 0.0, 0.0, 1.0};
    // Only the delta-term survives: 2*1*1.5/(0.25*0.25) * (1/2)(0.5)(-0.5)/1.5^2.
    CHECK(std::abs(pvi_rhs(0.5, 2.0, 0.0, th) - (-8.0 / 3.0)) < 1e-14);
    // The y'^2 and y' brackets: (13/6)/2 - 2/3.
    CHECK(std::abs(pvi_rhs(0.5, 2.0, 1.0, th) - pvi_rhs(0.5, 2.0, 0.0, th) - 5.0 / 12.0) < 1e-14);
    CHECK_THROWS_AS(pvi_rhs(0.5, 0.0, 1.0, th), SingularityError);
    CHECK_THROWS_AS(pvi_rhs(0.5, 1.0, 1.0, th), SingularityError);
    CHECK_THROWS_AS(pvi_rhs(0.5, 0.5, 1.0, th), SingularityError);
    CHECK_THROWS_AS(pvi_rhs(1.0, 2.0, 1.0, th), SingularityError);
}

TEST_CASE("scaled right-hand side") {
    const Thetas th = fixtures::reference().theta;
    for (double x : {0.03, 0.3, 0.7}) {
        const cplx y(0.4, 0.9), yp(-1.2, 0.5);
        CHECK(std::abs(pvi_rhs_scaled(x, y, x * yp, th) - x * x * pvi_rhs(x, y, yp, th)) < 1e-12);
    }
}

TEST_CASE("auxiliary function and gauge rates") {
    const Thetas th = fixtures::reference().theta;
    CHECK(std::abs(f_aux(th.t1, th.t2, th.t3, th.tinf, 0.3, 0.0, 0.0) + th.t1 * 0.3) < 1e-16);
    // D = 0 leaves the algebraic part of f.
    const double x = 0.2;
    const cplx y(0.7, 0.1), ti = th.t1 + th.t3 - th.t2;
    const cplx alg = (1.0 - ti) * y * y + ((th.t2 + ti) * x + th.t1 - th.t2 - 1.0) * y - th.t1 * x;
    CHECK(std::abs(x_l1(th, x, y, 0.0) - alg / (2.0 * (1.0 - x) * (1.0 - y) * y)) < 1e-14);
    CHECK(is_finite(x_l2(th, x, y, 0.3)));
}

TEST_CASE("coefficients of the purely imaginary sigma expansion") {
    PviData d{{0.0, 0.0, 0.4, 1.1}, cplx(0.0, 0.6), cplx(0.7, 0.2)};
    CHECK(std::abs(asymptotic_J1(d) - 1.0 / (16.0 * d.J)) < 1e-15);
    CHECK(std::abs(asymptotic_J2(d) - 0.5) < 1e-15);
}

TEST_CASE("asymptotic seed") {
    const auto d = fixtures::reference();
    const auto s = seed_asymptotic(d, 1e-4);
    CHECK(std::abs(s.y - d.J * std::pow(1e-4, 1.0 - d.sigma)) < 1e-15);
    CHECK(std::abs(s.yprime - (1.0 - d.sigma) * s.y / 1e-4) < 1e-12 * std::abs(s.yprime));
    CHECK_THROWS_AS(seed_asymptotic(d, 0.02), DomainError);
    CHECK_THROWS_AS(seed_asymptotic(d, 0.0), DomainError);
    auto z = d;
    z.sigma = 0.0;
    CHECK_THROWS_AS(seed_asymptotic(z, 1e-4), DomainError);
    CHECK(default_seed_point(d) <= 1e-4);

    // Purely imaginary sigma uses three terms.
    PviData im{{0.21, 0.52, 0.63, 1.41}, cplx(0.0, 0.4), cplx(0.9, 0.1)};
    const auto si = seed_asymptotic(im, 1e-4);
    const cplx three = im.J * std::pow(1e-4, 1.0 - im.sigma) + asymptotic_J1(im) * std::pow(1e-4, 1.0 + im.sigma) +
                       asymptotic_J2(im) * 1e-4;
    CHECK(std::abs(si.y - three) < 1e-15);
}

TEST_CASE("seed and integrator are consistent") {
    const auto d = fixtures::reference();
    const auto seed = seed_asymptotic(d, default_seed_point(d));
    double prev = 1.0;
    for (double x : {1e-3, 1e-4, 1e-5}) {
        const auto st = extend_trajectory(seed, d, {x}).front();
        const auto direct = seed_asymptotic(d, x);
        const double gap = std::abs(st.y - direct.y) / std::abs(direct.y);
        // Truncation order x^{min(Re sigma, 1 - Re sigma)}.
        CHECK(gap < 3.0 * std::pow(x, 0.37));
        CHECK(gap < prev);
        prev = gap;
    }
    // From x0 to 4 x0.
    const double x0 = 1e-6;
    const auto a = extend_trajectory(seed_asymptotic(d, x0), d, {4 * x0}).front();
    const auto b = seed_asymptotic(d, 4 * x0);
    CHECK(std::abs(a.y - b.y) / std::abs(b.y) < std::pow(4 * x0, 0.37));
    CHECK_THROWS_AS(extend_trajectory(seed_asymptotic(d, 1e-4), d, {1e-5, 1e-3}), DomainError);
}

TEST_CASE("Omega along the trajectory") {
    const auto d = fixtures::reference();
    const auto want = expected_spectrum(d.theta);
    for (double x : {1e-4, 1e-2, 0.1, 1.0 / 3.0}) {
        const CMatrix O = omega_at(d, x);
        CHECK(O(0, 0) == -d.theta.t1);
        CHECK(O(1, 1) == -d.theta.t2);
        CHECK(O(2, 2) == -d.theta.t3);
        const auto e = eigen3(O);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(e.values[k] - want[k]) < 1e-7);
    }
    // Leading behavior of Omega_12.
    const cplx lead = (d.theta.t1 - d.theta.t2 - d.sigma) / 2.0;
    double prev = 1.0;
    for (double x : {1e-3, 1e-5}) {
        const cplx v = omega_at(d, x)(0, 1) * std::pow(x, -(d.theta.t1 - d.theta.t2));
        const double gap = std::abs(v - lead);
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("gauge ratio") {
    const auto d = fixtures::reference();
    const auto seed = seed_asymptotic(d, default_seed_point(d));
    const auto st = extend_trajectory(seed, d, {1e-3, 1e-5});
    double prev = 1e300;
    for (const auto& s : st) {
        const cplx r = std::exp(s.log_k1 - s.log_k2 - (d.theta.t1 - d.theta.t2) * std::log(s.x));
        const double gap = std::abs(r - 1.0);
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("regularized limits at Re sigma = 1/2") {
    const auto d = fixtures::ladder_set(1);
    const auto run = run_ladder(d);
    CHECK(run.samples.size() == kDefaultLadder.size());
    const auto rep = regularized_limits(run.samples, d);
    CHECK(rep.max_abs_gap < 1e-4);
    CHECK_FALSE(rep.degraded_confidence);

    // Explicit (1,3) limit with k1 = k2 = 1.
    const auto [t1, t2, t3, ti] = d.theta;
    const cplx s = d.sigma;
    const cplx b13 = 0.5 * (-t3 - ti + s) - (t1 - t2 - s) * (t1 + t2 - s) * (t3 + ti + s) / (8.0 * s * s * d.J);
    CHECK(std::abs(rep.phi0_target(0, 2) - b13) < 1e-14);
    CHECK(std::abs(rep.phi0_est(0, 2) - b13) < 1e-4);

    // A limit: delta_2 Phi_0.
    CHECK(std::abs(rep.delta2_phi0_est(0, 1) - (t1 - t2 - s) / 2.0) < 1e-4);
    CHECK(std::abs(rep.delta2_phi0_est(1, 0) - (-t1 + t2 - s) / 2.0) < 1e-4);
    CHECK(std::abs(rep.delta2_phi0_est(0, 0) + t1) < 1e-10);

    // Seed order.
    CHECK(rep.seed_order.exponent >= 0.5 - 0.1);
}

TEST_CASE("ladder configuration errors") {
    const auto d = fixtures::reference();
    CHECK_THROWS_AS(run_ladder(d, {1e-2, 1e-3}), ConfigError);
    CHECK_THROWS_AS(run_ladder(d, {1e-2, 1e-3, 2.0}), ConfigError);
    CHECK_THROWS_AS(omega_at(d, 1.5), DomainError);
}

TEST_CASE("family point") {
    const auto d = fixtures::reference();
    CVector u(3);
    u << cplx(0.0, 0.0), cplx(0.0, 1.0), cplx(0.0, 3.0);
    const CMatrix P = phi_at(d, u);
    const CMatrix O = omega_at(d, 1.0 / 3.0);
    // Omega = (u3 - u1)^{dPhi} Phi (u3 - u1)^{-dPhi}.
    const cplx l = std::log(u(2) - u(0));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(std::exp((P(i, i) - P(j, j)) * l) * P(i, j) - O(i, j)) < 1e-10);
}
