#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isolab/linalg.hpp"
#include "isolab/types.hpp"

namespace isolab {

struct Thetas {
    cplx t1, t2, t3, tinf;
};

// (theta_1, theta_2, theta_3, theta_inf, sigma, J): asymptotic data of a PVI
// branch at x = 0, y ~ J x^{1-sigma}.
struct PviData {
    Thetas theta;
    cplx sigma;
    cplx J;
};

// Boundary value Phi_0 together with the diagonal gauge diag(k1, k2, 1) that
// was applied to the normalized representative.
struct BoundaryValue {
    CMatrix phi0;
    cplx k1{1.0, 0.0};
    cplx k2{1.0, 0.0};
};

struct StokesPair {
    CMatrix s_plus;   // upper triangular
    CMatrix s_minus;  // lower triangular
};

struct MonodromyData {
    cplx p12, p13, p23;
    cplx p1, p2, p3, pinf;
};

struct Tolerances {
    double pole = 1e-9;        // distance of Gamma arguments to nonpositive integers
    double excluded = 1e-9;    // distance to the excluded sets of the genericity conditions
    double degeneracy = 1e-8;  // relative gap for "distinct eigenvalues"
    double triangular = 1e-8;  // diagonal law tolerance for arrow_p inputs
};

struct ArrowOptions {
    bool require_generic = true;
    Tolerances tol;
};

struct GenericityViolation {
    std::string code;
    std::string description;
};

// Checks the strip 0 <= Re sigma < 1 and the genericity conditions: sigma, J
// nonzero, theta_j not integers, the eight combinations theta1 +- theta2 +- sigma
// and theta_inf +- theta3 +- sigma not even integers, theta_inf != 0 and
// theta_inf != +-(theta1 + theta2 + theta3). `margin` is the minimum distance to
// each excluded set.
std::vector<GenericityViolation> validate_generic(const PviData& d, double margin = 1e-9);

// Gauge-fixed Phi'_0 from asymptotic data.
BoundaryValue arrow_q(const PviData& d, const ArrowOptions& opt = {});

// Logarithmic (sigma = 0) branch parameterized by J_tilde.
BoundaryValue arrow_q_sigma0(const Thetas& th, cplx J_tilde, const ArrowOptions& opt = {});

struct QInverseResult {
    PviData data;
    // Phi_0 fixes theta_inf only up to sign; set when no hint was supplied and
    // the Re theta_inf >= 0 convention was applied.
    bool theta_inf_sign_conventional = false;
};

QInverseResult arrow_q_inverse(const BoundaryValue& b, std::optional<cplx> theta_inf_hint = std::nullopt,
                               const ArrowOptions& opt = {});

// 3x3 Stokes matrices from the closed forms.
StokesPair arrow_g(const BoundaryValue& b, const ArrowOptions& opt = {});

// Diagonal, super-diagonal (S+)_{k,k+1} and sub-diagonal (S-)_{k+1,k} entries
// for general n, returned as matrices with all other entries zero.
StokesPair arrow_g_subdiagonals(const CMatrix& phi0, const ArrowOptions& opt = {});

// Stokes matrices straight from (sigma, J, theta) in the gauge diag(k1, k2, 1).
StokesPair arrow_g_direct(const PviData& d, cplx k1 = 1.0, cplx k2 = 1.0, const ArrowOptions& opt = {});

MonodromyData arrow_p(const StokesPair& s, const Thetas& th, const ArrowOptions& opt = {});

// Intermediate quantities of the connection formula.
struct ConnectionCoefficients {
    cplx sigma, sigma13, sigma23;
    cplx a, b, c, d;
    cplx s, s_hat;
};

struct ArrowFResult {
    PviData data;
    ConnectionCoefficients coeffs;
};

ArrowFResult arrow_f(const MonodromyData& m, const Thetas& th, const ArrowOptions& opt = {});

// sigma with 0 <= Re sigma < 1 from p12 = 2 cos(pi sigma).
cplx sigma_from_trace(cplx p12);

struct ClosedFormTraces {
    cplx p23, p13;
    cplx L;
};

ClosedFormTraces p23_p13_closed_form(const PviData& d, const ArrowOptions& opt = {});

// |a + b - d/(L J)| with a, b from the monodromy produced by P(G(Q(d))).
double trace_identity_residual(const PviData& d, const ArrowOptions& opt = {});

// Cubic relation among the traces, complex value and modulus.
cplx cubic_value(const MonodromyData& m);
double cubic_residual(const MonodromyData& m);

MonodromyData with_theta_traces(cplx p12, cplx p13, cplx p23, const Thetas& th);

// Spectrum of Phi_0: {0, (tinf - s)/2, (-tinf - s)/2}, s = t1+t2+t3,
// sorted as in eigen3.
std::array<cplx, 3> expected_spectrum(const Thetas& th);

}  // namespace isolab
