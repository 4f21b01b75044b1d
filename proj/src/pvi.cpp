#include "isolab/pvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isolab/linalg.hpp"
#include "isolab/special.hpp"

namespace isolab {

namespace {

constexpr double kMaxLogMagnitude = 690.0;  // |k| within e^{+-690} ~ 1e+-300

cplx checked_exp(cplx z, const char* what) {
    if (std::abs(z.real()) > kMaxLogMagnitude) {
        throw ScalingError(std::string(what) + " outside the representable range 1e+-300");
    }
    return std::exp(z);
}

void check_regular(double x, cplx y, const char* what) {
    const double eps = 1e-300;
    if (std::abs(y) <= eps || std::abs(y - 1.0) <= eps || std::abs(y - x) <= eps) {
        throw SingularityError(std::string(what) + ": y at a singular value {0, 1, x}", cplx(x, 0.0));
    }
}

// Exponents {a(1 - sigma) + b sigma : a, b >= 0} with 0 < Re <= emax, sorted
// by real part, near-duplicates merged.
std::vector<cplx> correction_exponents(cplx sigma, double emax) {
    std::vector<cplx> e;
    for (int a = 0; a <= 8; ++a) {
        for (int b = 0; b <= 40; ++b) {
            const cplx v = double(a) * (1.0 - sigma) + double(b) * sigma;
            if (v.real() <= 1e-9 || v.real() > emax + 1e-12) continue;
            bool dup = false;
            for (const cplx& w : e) dup = dup || std::abs(w - v) < 1e-6;
            if (!dup) e.push_back(v);
        }
    }
    std::sort(e.begin(), e.end(), [](cplx p, cplx q) { return p.real() < q.real(); });
    return e;
}

// Exponent p of a correction C x^p from three points, solving
// |v1-v2|/|v2-v3| = (x1^p - x2^p)/(x2^p - x3^p) by bisection.
bool three_point_exponent(const double x[3], const cplx v[3], double& p) {
    const double d12 = std::abs(v[0] - v[1]), d23 = std::abs(v[1] - v[2]);
    const double scale = std::max({1.0, std::abs(v[0]), std::abs(v[2])});
    if (d23 <= 1e-13 * scale || d12 <= 1e-13 * scale) return false;
    const double r = d12 / d23;
    auto g = [&](double q) {
        return (std::pow(x[0], q) - std::pow(x[1], q)) / (std::pow(x[1], q) - std::pow(x[2], q));
    };
    double lo = 1e-3, hi = 4.0;
    if (r <= g(lo) || r >= g(hi)) return false;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < r) lo = mid; else hi = mid;
    }
    p = 0.5 * (lo + hi);
    return true;
}

// Least-squares fit v(x) = L + sum_m c_m x^{e_m}; returns L.
cplx fit_limit(const std::vector<double>& xs, const std::vector<cplx>& vs, const std::vector<cplx>& exps) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    const auto m = static_cast<Eigen::Index>(exps.size());
    CMatrix A(n, m + 1);
    CVector b(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        A(r, 0) = 1.0;
        const double lx = std::log(xs[r]);
        for (Eigen::Index c = 0; c < m; ++c) A(r, c + 1) = std::exp(exps[c] * lx);
        b(r) = vs[r];
    }
    // Column scaling keeps the problem well conditioned across decades.
    Eigen::VectorXd scale(m + 1);
    for (Eigen::Index c = 0; c <= m; ++c) {
        scale(c) = std::max(A.col(c).cwiseAbs().maxCoeff(), 1e-300);
        A.col(c) /= scale(c);
    }
    const CVector sol = A.completeOrthogonalDecomposition().solve(b);
    return sol(0) / scale(0);
}

EntryConvergence analyse_entry(int i, int j, const std::vector<double>& xs, const std::vector<cplx>& vs, cplx target,
                               const std::vector<cplx>& exps) {
    EntryConvergence e;
    e.i = i;
    e.j = j;
    e.target = target;
    e.last_value = vs.back();
    e.limit = exps.empty() ? vs.back() : fit_limit(xs, vs, exps);
    e.abs_gap = std::abs(e.limit - target);
    e.rel_gap = e.abs_gap / std::max(std::abs(target), 1e-300);
    const std::size_t n = xs.size();
    if (n >= 3) {
        const double x3[3] = {xs[n - 3], xs[n - 2], xs[n - 1]};
        const cplx v3[3] = {vs[n - 3], vs[n - 2], vs[n - 1]};
        double p = std::numeric_limits<double>::quiet_NaN();
        e.exponent_resolved = three_point_exponent(x3, v3, p);
        e.fitted_exponent = p;
    }
    for (std::size_t k = 2; k < n; ++k) {
        const double prev = std::abs(vs[k - 1] - vs[k - 2]);
        const double cur = std::abs(vs[k] - vs[k - 1]);
        if (cur > prev * 1.05 && cur > 1e-12 * std::max(1.0, std::abs(vs[k]))) e.monotone = false;
    }
    return e;
}

}  // namespace

cplx PviState::k1() const { return checked_exp(log_k1, "k1"); }
cplx PviState::k2() const { return checked_exp(log_k2, "k2"); }

cplx pvi_rhs(double x, cplx y, cplx yp, const Thetas& th) {
    if (x == 0.0 || x == 1.0) throw SingularityError("pvi_rhs: x at a fixed singularity", cplx(x, 0.0));
    check_regular(x, y, "pvi_rhs");
    const cplx alpha = 0.5 * (th.tinf - 1.0) * (th.tinf - 1.0);
    const cplx beta = -0.5 * th.t1 * th.t1;
    const cplx gamma = 0.5 * th.t3 * th.t3;
    const cplx delta = 0.5 * (1.0 - th.t2 * th.t2);
    const cplx first = 0.5 * (1.0 / y + 1.0 / (y - 1.0) + 1.0 / (y - x)) * yp * yp;
    const cplx second = (1.0 / x + 1.0 / (x - 1.0) + 1.0 / (y - x)) * yp;
    const cplx bracket = alpha + beta * x / (y * y) + gamma * (x - 1.0) / ((y - 1.0) * (y - 1.0)) +
                         delta * x * (x - 1.0) / ((y - x) * (y - x));
    const cplx third = y * (y - 1.0) * (y - x) / (x * x * (x - 1.0) * (x - 1.0)) * bracket;
    return first - second + third;
}

cplx pvi_rhs_scaled(double x, cplx y, cplx D, const Thetas& th) {
    const cplx alpha = 0.5 * (th.tinf - 1.0) * (th.tinf - 1.0);
    const cplx beta = -0.5 * th.t1 * th.t1;
    const cplx gamma = 0.5 * th.t3 * th.t3;
    const cplx delta = 0.5 * (1.0 - th.t2 * th.t2);
    const double xm1 = x - 1.0;
    const cplx ymx = y - x, ym1 = y - 1.0;
    return 0.5 * (1.0 / y + 1.0 / ym1 + 1.0 / ymx) * D * D - (1.0 + x / xm1 + x / ymx) * D +
           alpha * y * ym1 * ymx / (xm1 * xm1) + beta * x * ym1 * ymx / (xm1 * xm1 * y) +
           gamma * y * ymx / (xm1 * ym1) + delta * x * y * ym1 / (xm1 * ymx);
}

cplx f_aux(cplx t1, cplx t2, cplx, cplx tinf, double x, cplx y, cplx D) {
    return (1.0 - x) * D + (1.0 - tinf) * y * y + ((t2 + tinf) * x + t1 - t2 - 1.0) * y - t1 * x;
}

cplx x_l1(const Thetas& th, double x, cplx y, cplx D) {
    const cplx f = f_aux(th.t1, th.t2, th.t3, th.t1 + th.t3 - th.t2, x, y, D);
    return f / (2.0 * (1.0 - x) * (1.0 - y) * y);
}

cplx x_l2(const Thetas& th, double x, cplx y, cplx D) {
    const cplx f = f_aux(-th.t1, -th.t2, th.t3, th.t3 + th.t2 - th.t1, x, y, D);
    return f / (2.0 * (y - 1.0) * (x - y)) + x * (th.t2 - th.t3) / (x - 1.0);
}

cplx asymptotic_J1(const PviData& d) {
    const cplx s2 = d.sigma * d.sigma;
    const cplx dm = d.theta.t1 - d.theta.t2, dp = d.theta.t1 + d.theta.t2;
    return (s2 - dm * dm) * (s2 - dp * dp) / (16.0 * s2 * s2 * d.J);
}

cplx asymptotic_J2(const PviData& d) {
    const cplx s2 = d.sigma * d.sigma;
    return (d.theta.t1 * d.theta.t1 - d.theta.t2 * d.theta.t2 + s2) / (2.0 * s2);
}

PviState seed_asymptotic(const PviData& d, double x0) {
    if (!(x0 > 0.0) || x0 > 0.01) throw DomainError("seed_asymptotic: x0 must lie in (0, 0.01]");
    const cplx s = d.sigma;
    if (std::abs(s) == 0.0) throw DomainError("seed_asymptotic: sigma = 0, use seed_logarithmic");
    if (d.J == cplx(0.0)) throw DomainError("seed_asymptotic: J = 0");
    const double lx = std::log(x0);
    const cplx lead = d.J * std::exp((1.0 - s) * lx);
    PviState st;
    st.x = x0;
    st.y = lead;
    cplx D = (1.0 - s) * lead;  // x y'
    if (std::abs(s.real()) < 1e-12) {
        const cplx J1 = asymptotic_J1(d), J2 = asymptotic_J2(d);
        const cplx t1 = J1 * std::exp((1.0 + s) * lx);
        st.y += t1 + J2 * x0;
        D += (1.0 + s) * t1 + J2 * x0;
    }
    st.yprime = D / x0;
    const cplx xs = std::exp(s * lx);
    const cplx c1 = 1.0 - d.theta.t1 * xs / (2.0 * s * d.J);
    const cplx c2 = 1.0 + (d.theta.t2 - s) * xs / (2.0 * s * d.J);
    st.log_k1 = 0.5 * (d.theta.t1 - d.theta.t2 - s) * lx + std::log(c1);
    st.log_k2 = 0.5 * (-d.theta.t1 + d.theta.t2 - s) * lx + std::log(c2);
    return st;
}

PviState seed_logarithmic(const Thetas& th, cplx Jt, double x0) {
    if (!(x0 > 0.0) || x0 > 0.01) throw DomainError("seed_logarithmic: x0 must lie in (0, 0.01]");
    const cplx q = th.t1 * th.t1 - th.t2 * th.t2;
    if (std::abs(q) < 1e-12) throw DomainError("seed_logarithmic: requires theta1 != +-theta2");
    const double lx = std::log(x0);
    const cplx w = lx + 2.0 * Jt / q;
    const cplx A = -0.25 * q;
    const cplx B = th.t1 * th.t1 / q;
    PviState st;
    st.x = x0;
    st.y = x0 * (A * w * w + B);
    // x d/dx of x (A w^2 + B) = x (A w^2 + B) + x (2 A w)
    st.yprime = (A * w * w + B) + 2.0 * A * w;
    st.log_k1 = 0.5 * (th.t1 - th.t2) * lx;
    st.log_k2 = 0.5 * (-th.t1 + th.t2) * lx;
    return st;
}

double default_seed_point(const PviData& d) {
    const double rs = d.sigma.real();
    if (std::abs(rs) < 1e-12) return 1e-16;
    const double m = std::min(rs, 1.0 - rs);
    if (!(m > 0.0)) throw DomainError("default_seed_point: Re sigma outside (0, 1)");
    const double q = std::clamp(std::ceil(16.0 / m), 4.0, 250.0);
    return std::pow(10.0, -q);
}

std::vector<PviState> extend_trajectory(const PviState& seed, const PviData& d, const std::vector<double>& xs,
                                        const TrajectoryOptions& opt) {
    if (xs.empty()) return {};
    const Thetas th = d.theta;
    double xfar = seed.x;
    for (double x : xs) {
        if (!(x > 0.0 && x < 1.0)) throw DomainError("extend_trajectory: requested x outside (0, 1)");
        if (std::abs(std::log(x / seed.x)) > std::abs(std::log(xfar / seed.x))) xfar = x;
    }
    const double s0 = std::log(seed.x), s1 = std::log(xfar);
    std::vector<PviState> out;
    out.reserve(xs.size());
    if (s0 == s1) {
        for (std::size_t k = 0; k < xs.size(); ++k) out.push_back(seed);
        return out;
    }
    for (double x : xs) {
        const double s = std::log(x);
        if ((s - s0) * (s1 - s0) < 0.0) throw DomainError("extend_trajectory: requested points on both sides of the seed");
    }
    CVector y0(4);
    y0 << seed.y, seed.x * seed.yprime, seed.log_k1, seed.log_k2;
    RealRhs f = [&](double s, const CVector& st, CVector& dst) {
        const double x = std::exp(s);
        const cplx y = st(0), D = st(1);
        dst.resize(4);
        dst(0) = D;
        dst(1) = D + pvi_rhs_scaled(x, y, D, th);
        dst(2) = x_l1(th, x, y, D);
        dst(3) = x_l2(th, x, y, D);
    };
    OdeOptions oo;
    oo.rtol = opt.rtol;
    oo.atol = opt.atol;
    oo.max_steps = opt.max_steps;
    oo.keep_dense = true;
    OdeSolution sol;
    try {
        sol = integrate(f, s0, s1, y0, oo);
    } catch (const SingularityError& e) {
        const double xl = std::exp(e.location().real());
        throw SingularityError("extend_trajectory: movable singularity of PVI near x = " + std::to_string(xl),
                               cplx(xl, 0.0));
    }
    for (double x : xs) {
        const CVector v = sol.at(std::log(x));
        PviState st;
        st.x = x;
        st.y = v(0);
        st.yprime = v(1) / x;
        st.log_k1 = v(2);
        st.log_k2 = v(3);
        out.push_back(st);
    }
    return out;
}

CMatrix omega_from_state(const PviState& st, const Thetas& th) {
    const double x = st.x;
    const cplx y = st.y, D = x * st.yprime;
    check_regular(x, y, "omega_from_state");
    const auto& [t1, t2, t3, ti] = th;
    const cplx r12 = checked_exp(st.log_k1 - st.log_k2, "k1/k2");
    const cplx k1 = st.k1(), k2 = st.k2();
    CMatrix O = CMatrix::Zero(3, 3);
    O(0, 0) = -t1;
    O(1, 1) = -t2;
    O(2, 2) = -t3;
    O(0, 1) = r12 * f_aux(t1, t2, t3, ti, x, y, D) / (2.0 * (1.0 - x) * y);
    O(1, 0) = f_aux(-t1, -t2, t3, ti, x, y, D) / (2.0 * (y - x)) / r12;
    O(0, 2) = k1 * f_aux(t1, t1 - t3 - ti, t3, ti, x, y, D) / (2.0 * (x - 1.0) * y);
    O(2, 0) = f_aux(-t1, -t1 + t3 - ti, t3, ti, x, y, D) / (2.0 * x * (y - 1.0)) / k1;
    O(1, 2) = k2 * f_aux(-t2 + t3 + ti, -t2, t3, ti, x, y, D) / (2.0 * (x - y));
    O(2, 1) = f_aux(t2 - t3 + ti, t2, t3, ti, x, y, D) / (2.0 * x * (1.0 - y)) / k2;
    return O;
}

TrajectorySample make_sample(const PviState& s, const Thetas& th, const CMatrix& delta2_phi0) {
    TrajectorySample out;
    out.state = s;
    out.omega = omega_from_state(s, th);
    const double x = s.x;
    const double lx = std::log(x);
    CMatrix M(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) M(i, j) = out.omega(i, j) * std::exp((out.omega(i, i) - out.omega(j, j)) * lx);
    }
    out.a_matrix = delta_k(M, 2);
    const CMatrix xm = matrix_power_scalar(-delta2_phi0, x);
    const CMatrix xp = matrix_power_scalar(delta2_phi0, x);
    out.b_matrix = xm * M * xp;
    return out;
}

LadderRun run_ladder(const PviData& d, const std::vector<double>& ladder, const TrajectoryOptions& opt) {
    if (ladder.size() < 3) throw ConfigError("run_ladder: need at least three ladder points");
    std::vector<double> xs = ladder;
    std::sort(xs.begin(), xs.end(), std::greater<>());
    if (xs.front() >= 1.0 || xs.back() <= 0.0) throw ConfigError("run_ladder: ladder points must lie in (0, 1)");
    LadderRun run;
    run.seed_x = std::min(default_seed_point(d), xs.back() * 1e-3);
    const PviState seed = seed_asymptotic(d, run.seed_x);
    const auto states = extend_trajectory(seed, d, xs, opt);
    ArrowOptions ao;
    ao.require_generic = false;
    const CMatrix d2 = delta_k(arrow_q(d, ao).phi0, 2);
    for (const auto& st : states) run.samples.push_back(make_sample(st, d.theta, d2));
    return run;
}

LimitReport regularized_limits(const std::vector<TrajectorySample>& traj, const PviData& d, const LimitOptions& opt) {
    if (traj.size() < 3) throw ConfigError("regularized_limits: need at least three samples");
    std::vector<TrajectorySample> t = traj;
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.state.x > b.state.x; });
    std::vector<double> xs;
    for (const auto& s : t) xs.push_back(s.state.x);

    ArrowOptions ao;
    ao.require_generic = false;
    LimitReport rep;
    rep.phi0_target = arrow_q(d, ao).phi0;
    const CMatrix d2_target = delta_k(rep.phi0_target, 2);

    // Keep the fit overdetermined by at least two points.
    auto exps = correction_exponents(d.sigma, opt.max_model_exponent);
    const std::size_t max_terms = xs.size() >= 3 ? xs.size() - 3 : 0;
    if (exps.size() > max_terms) exps.resize(max_terms);
    rep.exponent_model = exps;

    const double rs = d.sigma.real();
    rep.degraded_confidence = rs < 0.05 || rs > 0.95;
    if (rep.degraded_confidence) rep.warnings.push_back("Re sigma within 0.05 of the strip boundary");

    rep.delta2_phi0_est = CMatrix::Zero(3, 3);
    rep.phi0_est = CMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            std::vector<cplx> vb;
            for (const auto& s : t) vb.push_back(s.b_matrix(i, j));
            auto eb = analyse_entry(i, j, xs, vb, rep.phi0_target(i, j), exps);
            rep.phi0_est(i, j) = eb.limit;
            rep.max_abs_gap = std::max(rep.max_abs_gap, eb.abs_gap);
            if (!eb.monotone) {
                rep.warnings.push_back("B(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                       ") converges non-monotonically");
            }
            rep.b_entries.push_back(eb);

            const bool in_delta2 = (i < 2 && j < 2) || i == j;
            if (!in_delta2) continue;
            std::vector<cplx> va;
            for (const auto& s : t) va.push_back(s.a_matrix(i, j));
            auto ea = analyse_entry(i, j, xs, va, d2_target(i, j), exps);
            rep.delta2_phi0_est(i, j) = ea.limit;
            rep.a_entries.push_back(ea);
        }
    }

    // Relative correction of y against the leading term.
    std::vector<double> lx, lg;
    for (const auto& s : t) {
        const cplx lead = d.J * std::exp((1.0 - d.sigma) * std::log(s.state.x));
        const double g = std::abs(s.state.y - lead) / std::abs(lead);
        rep.seed_order.x.push_back(s.state.x);
        rep.seed_order.rel_gap.push_back(g);
        if (g > 0.0) {
            lx.push_back(std::log(s.state.x));
            lg.push_back(std::log(g));
        }
    }
    if (lx.size() >= 2) {
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / double(lx.size());
        const double mg = std::accumulate(lg.begin(), lg.end(), 0.0) / double(lg.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k) {
            sxy += (lx[k] - mx) * (lg[k] - mg);
            sxx += (lx[k] - mx) * (lx[k] - mx);
        }
        rep.seed_order.exponent = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    return rep;
}

CMatrix omega_at(const PviData& d, double x, const TrajectoryOptions& opt) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("omega_at: x must lie in (0, 1)");
    const double x0 = std::min(default_seed_point(d), x * 1e-3);
    const PviState seed = seed_asymptotic(d, x0);
    const auto st = extend_trajectory(seed, d, {x}, opt);
    return omega_from_state(st.front(), d.theta);
}

CMatrix phi_at(const PviData& d, const CVector& u, const TrajectoryOptions& opt) {
    if (u.size() != 3) throw DomainError("phi_at: need three deformation parameters");
    const cplx w = u(2) - u(0);
    if (std::abs(w) == 0.0) throw DomainError("phi_at: u1 = u3");
    const cplx xc = (u(1) - u(0)) / w;
    if (std::abs(xc.imag()) > 1e-12 * std::max(1.0, std::abs(xc)) || !(xc.real() > 0.0 && xc.real() < 1.0)) {
        throw DomainError("phi_at: cross-ratio x must be real in (0, 1)");
    }
    const CMatrix O = omega_at(d, xc.real(), opt);
    const cplx lw = branched_log(w, LogBranch::principal);
    CMatrix P(3, 3);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) P(i, j) = O(i, j) * std::exp(-(O(i, i) - O(j, j)) * lw);
    }
    return P;
}

}  // namespace isolab
