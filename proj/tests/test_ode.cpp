#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "isolab/ode.hpp"

using namespace isolab;

namespace {

OdeSolution scalar_exp(cplx lambda, double rtol, double atol, bool dense = false) {
    RealRhs f = [lambda](double, const CVector& y, CVector& dy) { dy = lambda * y; };
    OdeOptions o;
    o.rtol = rtol;
    o.atol = atol;
    o.keep_dense = dense;
    CVector y0(1);
    y0(0) = 1.0;
    return integrate(f, 0.0, 1.0, y0, o);
}

}  // namespace

TEST_CASE("linear scalar problem") {
    const auto sol = scalar_exp(kI, 1e-10, 1e-12);
    CHECK(std::abs(sol.final_state()(0) - std::exp(kI)) < 1e-9);
    CHECK(sol.stats.steps > 0);
}

TEST_CASE("constant-coefficient system against the eigendecomposition") {
    Eigen::Matrix2cd A;
    A << cplx(0.1, 0.3), cplx(-1.0, 0.2), cplx(0.5, 0.0), cplx(-0.4, 0.1);
    RealRhs f = [&](double, const CVector& y, CVector& dy) { dy = A * y; };
    CVector y0(2);
    y0 << 1.0, cplx(0.0, 1.0);
    OdeOptions o;
    o.rtol = 1e-11;
    o.atol = 1e-13;
    const auto sol = integrate(f, 0.0, 2.0, y0, o);
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(A);
    const Eigen::Matrix2cd V = es.eigenvectors();
    Eigen::Vector2cd ex;
    for (int k = 0; k < 2; ++k) ex(k) = std::exp(2.0 * es.eigenvalues()(k));
    const Eigen::Vector2cd want = V * ex.asDiagonal() * V.inverse() * y0;
    CHECK((sol.final_state() - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("error scales with the tolerance") {
    double prev = 0.0;
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        const auto sol = scalar_exp(1.0, tol, tol * 1e-2);
        const double err = std::abs(sol.final_state()(0) - std::exp(1.0));
        CHECK(err < 10.0 * tol);
        if (prev > 0.0) {
            // Two decades tighter: at least one decade less error.
            CHECK(err < prev / 10.0);
        }
        prev = err;
    }
}

TEST_CASE("forward then backward returns the start") {
    RealRhs f = [](double t, const CVector& y, CVector& dy) {
        dy.resize(2);
        dy(0) = y(1);
        dy(1) = -std::sin(t) * y(0) + kI * 0.1 * y(1);
    };
    CVector y0(2);
    y0 << cplx(1.0, 0.5), cplx(-0.3, 0.0);
    OdeOptions o;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    const auto fw = integrate(f, 0.0, 5.0, y0, o);
    const auto bw = integrate(f, 5.0, 0.0, fw.final_state(), o);
    CHECK((bw.final_state() - y0).cwiseAbs().maxCoeff() < 50.0 * o.rtol);
}

TEST_CASE("dense output") {
    const auto sol = scalar_exp(cplx(-0.5, 2.0), 1e-11, 1e-13, true);
    for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
        CHECK(std::abs(sol.at(t)(0) - std::exp(cplx(-0.5, 2.0) * t)) < 1e-9);
    }
    CHECK_THROWS_AS(sol.at(1.5), DomainError);
}

TEST_CASE("blow-up is reported as a singularity") {
    RealRhs f = [](double, const CVector& y, CVector& dy) { dy = y.cwiseProduct(y); };
    CVector y0(1);
    y0(0) = 1.0;
    try {
        integrate(f, 0.0, 2.0, y0);
        FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
        CHECK(std::abs(e.location().real() - 1.0) < 1e-3);
    }
}

TEST_CASE("step budget") {
    OdeOptions o;
    o.max_steps = 5;
    RealRhs f = [](double, const CVector& y, CVector& dy) { dy = 50.0 * kI * y; };
    CVector y0(1);
    y0(0) = 1.0;
    CHECK_THROWS_AS(integrate(f, 0.0, 10.0, y0, o), BudgetError);
}

TEST_CASE("complex path around the origin") {
    // y' = a y / z picks up e^{2 pi i a} once around z = 0.
    const cplx a(0.3, 0.1);
    ComplexRhs f = [a](cplx z, const CVector& y, CVector& dy) { dy = a * y / z; };
    const auto path = ContourPath::arc(0.0, 1.0, 0.0, 2.0 * kPi, 64);
    CHECK(path.length() == doctest::Approx(2.0 * kPi).epsilon(1e-3));
    CVector y0(1);
    y0(0) = 1.0;
    OdeOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    const auto sol = integrate_path(f, path, y0, o);
    CHECK(std::abs(sol.y(0) - std::exp(2.0 * kPi * kI * a)) < 1e-10);
    ContourPath seg{{cplx(1.0, 0.0)}};
    seg.line_to(cplx(2.0, 0.0));
    CHECK(std::abs(integrate_path(f, seg, y0, o).y(0) - std::pow(2.0, a)) < 1e-11);
    CHECK_THROWS_AS(integrate_path(f, ContourPath{{cplx(1.0, 0.0)}}, y0, o), DomainError);
}
