#include "isolab/ode.hpp"

#include <algorithm>
#include <cmath>

namespace isolab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension coefficients.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool all_finite(const CVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!is_finite(v(i))) return false;
    }
    return true;
}

// RMS norm over real components, each scaled by atol + rtol*max(|y0|,|y1|).
double error_norm(const CVector& err, const CVector& y0, const CVector& y1, double rtol, double atol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double e = std::abs(err(i)) / sc;
        acc += e * e;
    }
    return std::sqrt(acc / double(std::max<Eigen::Index>(err.size(), 1)));
}

struct Stepper {
    const RealRhs& f;
    const OdeOptions& opt;
    OdeStats stats;

    void eval(double t, const CVector& y, CVector& out) {
        f(t, y, out);
        ++stats.rhs_evals;
    }

    double initial_step(double t0, const CVector& y0, const CVector& f0, double dir, double span) {
        // Hairer-Norsett-Wanner starting-step heuristic.
        const double d0 = error_norm(y0, y0, y0, opt.rtol, opt.atol);
        const double dd1 = error_norm(f0, y0, y0, opt.rtol, opt.atol);
        double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
        h0 = std::min(h0, span);
        CVector y1 = y0 + dir * h0 * f0;
        CVector f1(y0.size());
        eval(t0 + dir * h0, y1, f1);
        const double dd2 = all_finite(f1) ? error_norm(f1 - f0, y0, y0, opt.rtol, opt.atol) / h0 : 1e300;
        const double m = std::max(dd1, dd2);
        const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
        return std::min({100.0 * h0, h1, span});
    }
};

}  // namespace

CVector OdeSolution::at(double tq) const {
    if (dense.empty()) {
        if (!t.empty() && tq == t.front()) return y.front();
        throw DomainError("OdeSolution::at: no dense output recorded");
    }
    const bool forward = dense.front().h > 0.0;
    // Locate the step containing tq.
    std::size_t lo = 0, hi = dense.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        const bool after = forward ? tq >= dense[mid].t0 : tq <= dense[mid].t0;
        if (after) lo = mid; else hi = mid;
    }
    const DenseStep& s = dense[lo];
    const double th = (tq - s.t0) / s.h;
    if (th < -1e-9 || th > 1.0 + 1e-9) throw DomainError("OdeSolution::at: query outside integrated range");
    const double th1 = 1.0 - th;
    return s.r[0] + th * (s.r[1] + th1 * (s.r[2] + th * (s.r[3] + th1 * s.r[4])));
}

OdeSolution integrate(const RealRhs& f, double t0, double t1, const CVector& y0, const OdeOptions& opt) {
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw DomainError("integrate: rtol and atol must be positive");
    const double span = std::abs(t1 - t0);
    if (!(span > 0.0) || !std::isfinite(span)) throw DomainError("integrate: path must have positive finite length");
    if (!all_finite(y0)) throw DomainError("integrate: non-finite initial state");

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const Eigen::Index n = y0.size();
    Stepper st{f, opt, {}};
    OdeSolution sol;
    sol.t.push_back(t0);
    sol.y.push_back(y0);

    CVector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
    double t = t0;
    CVector y = y0;
    st.eval(t, y, k1);
    if (!all_finite(k1)) throw SingularityError("integrate: vector field not finite at start", t0);

    const double hmax = opt.max_step > 0.0 ? std::min(opt.max_step, span) : span;
    double h = opt.initial_step > 0.0 ? opt.initial_step : st.initial_step(t, y, k1, dir, span);
    h = std::min(h, hmax);
    const double hmin = opt.min_step_fraction * span;

    // PI controller constants (Hairer's DOPRI5 defaults).
    const double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9, fac_min = 0.2, fac_max = 10.0;
    double facold = 1e-4;
    bool last_rejected = false;

    while (dir * (t1 - t) > 0.0) {
        if (sol.stats.steps + st.stats.rejections >= opt.max_steps) {
            throw BudgetError("integrate: step budget exhausted at t = " + std::to_string(t));
        }
        if (h < hmin) {
            throw SingularityError("integrate: step size collapsed near t = " + std::to_string(t), t);
        }
        bool final_step = false;
        if (h >= std::abs(t1 - t) * (1.0 - 1e-12)) {
            h = std::abs(t1 - t);
            final_step = true;
        }
        const double hs = dir * h;

        ytmp = y + hs * a21 * k1;
        st.eval(t + c2 * hs, ytmp, k2);
        ytmp = y + hs * (a31 * k1 + a32 * k2);
        st.eval(t + c3 * hs, ytmp, k3);
        ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
        st.eval(t + c4 * hs, ytmp, k4);
        ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        st.eval(t + c5 * hs, ytmp, k5);
        ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        st.eval(t + hs, ytmp, k6);
        ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const double tnew = final_step ? t1 : t + hs;
        st.eval(tnew, ynew, k7);

        double e = 1e300;
        if (all_finite(ynew) && all_finite(k7)) {
            err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            e = error_norm(err, y, ynew, opt.rtol, opt.atol);
        }
        if (!std::isfinite(e)) e = 1e300;

        if (e <= 1.0) {
            if (opt.keep_dense) {
                DenseStep ds;
                ds.t0 = t;
                ds.h = hs;
                ds.r[0] = y;
                ds.r[1] = ynew - y;
                ds.r[2] = hs * k1 - ds.r[1];
                ds.r[3] = ds.r[1] - hs * k7 - ds.r[2];
                ds.r[4] = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                sol.dense.push_back(std::move(ds));
            }
            t = tnew;
            y = ynew;
            k1 = k7;  // FSAL
            ++sol.stats.steps;
            sol.t.push_back(t);
            sol.y.push_back(y);
            const double fac11 = std::pow(std::max(e, 1e-16), expo1);
            double fac = fac11 / std::pow(facold, beta) / safe;
            fac = std::clamp(fac, 1.0 / fac_max, 1.0 / fac_min);
            double hnew = h / fac;
            if (last_rejected) hnew = std::min(hnew, h);
            facold = std::max(e, 1e-4);
            h = std::min(hnew, hmax);
            last_rejected = false;
        } else {
            ++st.stats.rejections;
            const double fac = e >= 1e299 ? 4.0 : std::min(1.0 / fac_min, std::pow(e, expo1) / safe);
            h /= fac;
            last_rejected = true;
        }
    }
    sol.stats.rejections = st.stats.rejections;
    sol.stats.rhs_evals = st.stats.rhs_evals;
    return sol;
}

double ContourPath::length() const {
    double L = 0.0;
    for (std::size_t i = 1; i < vertices.size(); ++i) L += std::abs(vertices[i] - vertices[i - 1]);
    return L;
}

ContourPath ContourPath::arc(cplx center, double radius, double a, double b, int segments) {
    ContourPath p;
    for (int k = 0; k <= segments; ++k) {
        const double phi = a + (b - a) * double(k) / double(segments);
        p.vertices.push_back(center + radius * std::exp(kI * phi));
    }
    return p;
}

ContourPath& ContourPath::then(const ContourPath& other) {
    for (std::size_t i = 0; i < other.vertices.size(); ++i) {
        if (i == 0 && !vertices.empty() && std::abs(vertices.back() - other.vertices[0]) < 1e-14) continue;
        vertices.push_back(other.vertices[i]);
    }
    return *this;
}

ContourPath& ContourPath::line_to(cplx z) {
    vertices.push_back(z);
    return *this;
}

PathSolution integrate_path(const ComplexRhs& f, const ContourPath& path, const CVector& y0, const OdeOptions& opt) {
    if (path.vertices.size() < 2 || !(path.length() > 0.0)) {
        throw DomainError("integrate_path: path must have positive length");
    }
    PathSolution out{y0, {}};
    OdeOptions seg_opt = opt;
    seg_opt.keep_dense = false;
    for (std::size_t k = 1; k < path.vertices.size(); ++k) {
        const cplx za = path.vertices[k - 1];
        const cplx dz = path.vertices[k] - za;
        const double L = std::abs(dz);
        if (L == 0.0) continue;
        const cplx unit = dz / L;
        RealRhs g = [&](double s, const CVector& y, CVector& dy) {
            f(za + unit * s, y, dy);
            dy *= unit;
        };
        try {
            OdeSolution sol = integrate(g, 0.0, L, out.y, seg_opt);
            out.y = sol.final_state();
            out.stats.steps += sol.stats.steps;
            out.stats.rejections += sol.stats.rejections;
            out.stats.rhs_evals += sol.stats.rhs_evals;
        } catch (const SingularityError& e) {
            throw SingularityError(e.what(), za + unit * e.location().real());
        }
    }
    return out;
}

}  // namespace isolab
