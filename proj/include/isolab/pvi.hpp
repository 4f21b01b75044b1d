#pragma once

#include <string>
#include <vector>

#include "isolab/arrows.hpp"
#include "isolab/ode.hpp"
#include "isolab/types.hpp"

namespace isolab {

// Point on a PVI trajectory. The gauge functions are carried as logarithms so
// that seeds very close to x = 0 stay representable.
struct PviState {
    double x = 0.0;
    cplx y;
    cplx yprime;  // dy/dx
    cplx log_k1;
    cplx log_k2;

    cplx k1() const;  // throws ScalingError outside 1e+-300
    cplx k2() const;
};

// y'' evaluated term by term.
cplx pvi_rhs(double x, cplx y, cplx yprime, const Thetas& th);

// x^2 y'' written in terms of D = x y'. Finite for tiny x.
cplx pvi_rhs_scaled(double x, cplx y, cplx D, const Thetas& th);

// f(theta1, theta2, theta3, theta_inf; x, y) with dy/dx supplied as D = x y'.
cplx f_aux(cplx t1, cplx t2, cplx t3, cplx tinf, double x, cplx y, cplx D);

// x l_1(x) and x l_2(x), i.e. d log k_i / d log x.
cplx x_l1(const Thetas& th, double x, cplx y, cplx D);
cplx x_l2(const Thetas& th, double x, cplx y, cplx D);

cplx asymptotic_J1(const PviData& d);
cplx asymptotic_J2(const PviData& d);

// Seed from the leading asymptotics at x0 in (0, 0.01], k_i^0 = 1.
PviState seed_asymptotic(const PviData& d, double x0);

// sigma = 0 logarithmic branch parameterized by J_tilde.
PviState seed_logarithmic(const Thetas& th, cplx J_tilde, double x0);

// Seed point small enough that the truncation error of the leading term is
// below double precision.
double default_seed_point(const PviData& d);

struct TrajectoryOptions {
    double rtol = 1e-13;
    double atol = 1e-300;
    std::size_t max_steps = 2'000'000;
};

// Joint integration of (y, x y', log k1, log k2) in log x. Returns states at
// each requested x, in the order given.
std::vector<PviState> extend_trajectory(const PviState& seed, const PviData& d, const std::vector<double>& xs,
                                        const TrajectoryOptions& opt = {});

CMatrix omega_from_state(const PviState& s, const Thetas& th);

struct TrajectorySample {
    PviState state;
    CMatrix omega;
    CMatrix a_matrix;  // delta_2(x^{dPhi} Omega x^{-dPhi})
    CMatrix b_matrix;  // x^{-delta_2 Phi_0} x^{dPhi} Omega x^{-dPhi} x^{delta_2 Phi_0}
};

// Builds A and B at the sample; delta2_phi0 is the delta_2 part of the target
// boundary value.
TrajectorySample make_sample(const PviState& s, const Thetas& th, const CMatrix& delta2_phi0);

inline const std::vector<double> kDefaultLadder = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5};

struct LadderRun {
    double seed_x = 0.0;
    std::vector<TrajectorySample> samples;
};

// Seeds at default_seed_point, integrates across the ladder and assembles samples.
LadderRun run_ladder(const PviData& d, const std::vector<double>& ladder = kDefaultLadder,
                     const TrajectoryOptions& opt = {});

struct EntryConvergence {
    int i = 0;
    int j = 0;
    cplx limit;          // extrapolated value
    cplx last_value;     // value at the smallest x
    cplx target;         // closed-form value
    double abs_gap = 0.0;
    double rel_gap = 0.0;
    double fitted_exponent = 0.0;  // from the last three ladder points; NaN if not resolvable
    bool exponent_resolved = false;
    bool monotone = true;
};

struct SeedOrderReport {
    std::vector<double> x;
    std::vector<double> rel_gap;  // |y(x) - J x^{1-sigma}| / |J x^{1-sigma}|
    double exponent = 0.0;
};

struct LimitReport {
    CMatrix delta2_phi0_est;
    CMatrix phi0_est;
    CMatrix phi0_target;
    std::vector<EntryConvergence> a_entries;
    std::vector<EntryConvergence> b_entries;
    SeedOrderReport seed_order;
    std::vector<cplx> exponent_model;
    double max_abs_gap = 0.0;
    bool degraded_confidence = false;
    std::vector<std::string> warnings;
};

struct LimitOptions {
    double max_model_exponent = 1.25;
};

// Extrapolates A(x) and B(x) to x = 0 and compares with the closed form.
LimitReport regularized_limits(const std::vector<TrajectorySample>& traj, const PviData& d,
                               const LimitOptions& opt = {});

// Solution Phi(u) of the isomonodromy equations with boundary value
// arrow_q(d), at u with x = (u2-u1)/(u3-u1) real in (0, 1).
CMatrix phi_at(const PviData& d, const CVector& u, const TrajectoryOptions& opt = {});

// Omega(x) of the same family.
CMatrix omega_at(const PviData& d, double x, const TrajectoryOptions& opt = {});

}  // namespace isolab
