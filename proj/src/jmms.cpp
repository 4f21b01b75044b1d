#include "isolab/jmms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isolab/linalg.hpp"
#include "isolab/ode.hpp"

namespace isolab {

namespace {

CVector pack(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

CMatrix unpack(const CVector& v, Eigen::Index n) { return Eigen::Map<const CMatrix>(v.data(), n, n); }

void check_index(const CVector& u, const CMatrix& phi, int k) {
    if (phi.rows() != phi.cols() || phi.rows() != u.size()) throw DomainError("jmms: u and phi sizes differ");
    if (k < 0 || k >= u.size()) throw DomainError("jmms: direction index out of range");
}

double min_gap(const CVector& u) {
    double g = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < u.size(); ++i)
        for (Eigen::Index j = i + 1; j < u.size(); ++j) g = std::min(g, std::abs(u(i) - u(j)));
    return g;
}

}  // namespace

void require_off_diagonal(const JmmsState& s, double tol) {
    require_valid(s.phi, "jmms state");
    if (s.phi.rows() != s.u.size()) throw DomainError("jmms: u and phi sizes differ");
    if (min_gap(s.u) <= tol) throw DomainError("jmms: u lies on the fat diagonal");
}

CMatrix jmms_rhs(const CVector& u, const CMatrix& phi, int k) {
    check_index(u, phi, k);
    if (min_gap(u) == 0.0) throw DomainError("jmms_rhs: coincident u");
    const Eigen::Index n = phi.rows();
    CMatrix r = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i == k) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == k || j == i) continue;
            r(i, j) = (1.0 / (u(k) - u(i)) - 1.0 / (u(k) - u(j))) * phi(i, k) * phi(k, j);
        }
        // Column k and row k.
        cplx col = 0.0, row = 0.0;
        for (Eigen::Index m = 0; m < n; ++m) {
            if (m == k) continue;
            const cplx w = 1.0 / (u(k) - u(m));
            col += ((m == i ? phi(k, k) : cplx(0.0)) - phi(i, m)) * w * phi(m, k);
            row += phi(k, m) * (phi(m, i) - (m == i ? phi(k, k) : cplx(0.0))) * w;
        }
        r(i, k) = col;
        r(k, i) = row;
    }
    return r;
}

CMatrix jmms_rhs_commutator(const CVector& u, const CMatrix& phi, int k) {
    check_index(u, phi, k);
    const Eigen::Index n = phi.rows();
    CVector d(n);
    for (Eigen::Index b = 0; b < n; ++b) {
        if (b == k) {
            d(b) = 0.0;
        } else {
            if (u(b) == u(k)) throw DomainError("jmms_rhs_commutator: coincident u");
            d(b) = 1.0 / (u(b) - u(k));
        }
    }
    // [E_k, Phi] keeps row k and minus column k.
    CMatrix X = CMatrix::Zero(n, n);
    X.row(k) = phi.row(k);
    X.col(k) -= phi.col(k);
    CMatrix Y(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) Y(i, j) = (d(i) - d(j)) * X(i, j);
    return Y * phi - phi * Y;
}

JmmsState flow(const JmmsState& initial, int k, cplx delta_u, const FlowOptions& opt) {
    require_off_diagonal(initial, opt.fat_diagonal_tol);
    check_index(initial.u, initial.phi, k);
    const Eigen::Index n = initial.phi.rows();
    JmmsState out = initial;
    if (delta_u == cplx(0.0)) return out;
    // The straight segment u_k + t delta_u, t in [0,1], must keep its distance
    // from every other u_j.
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == k) continue;
        const cplx w = initial.u(j) - initial.u(k);
        const double t = std::clamp((std::conj(delta_u) * w).real() / std::norm(delta_u), 0.0, 1.0);
        if (std::abs(w - t * delta_u) <= opt.fat_diagonal_tol) {
            throw DomainError("jmms flow: path crosses the fat diagonal at u_" + std::to_string(j + 1));
        }
    }
    const CVector u0 = initial.u;
    RealRhs f = [&](double t, const CVector& y, CVector& dy) {
        CVector u = u0;
        u(k) += t * delta_u;
        dy = pack(jmms_rhs(u, unpack(y, n), k) * delta_u);
    };
    OdeOptions oo;
    oo.rtol = opt.rtol;
    oo.atol = opt.atol;
    oo.max_steps = opt.max_steps;
    const auto sol = integrate(f, 0.0, 1.0, pack(initial.phi), oo);
    out.u(k) += delta_u;
    out.phi = unpack(sol.final_state(), n);
    return out;
}

double block_band(const CMatrix& phi, int m) {
    if (m < 1 || m > phi.rows()) throw DomainError("block_band: block size out of range");
    const auto ev = eigenvalues(phi.topLeftCorner(m, m));
    double band = 0.0;
    for (std::size_t i = 0; i < ev.size(); ++i)
        for (std::size_t j = i + 1; j < ev.size(); ++j) band = std::max(band, std::abs((ev[i] - ev[j]).real()));
    return band;
}

double spectral_distance(const CMatrix& A, const CMatrix& B) {
    auto a = eigenvalues(A);
    auto b = eigenvalues(B);
    if (a.size() != b.size()) throw DomainError("spectral_distance: size mismatch");
    double worst = 0.0;
    for (const cplx& x : a) {
        auto it = std::min_element(b.begin(), b.end(),
                                   [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

ShrinkingReport shrinking_check(const JmmsState& initial, cplx ray, const std::vector<double>& reaches,
                                const FlowOptions& opt) {
    require_off_diagonal(initial, opt.fat_diagonal_tol);
    const Eigen::Index n = initial.phi.rows();
    if (n < 2) throw DomainError("shrinking_check: need n >= 2");
    const int last = static_cast<int>(n - 1);
    const cplx un0 = initial.u(last);
    const double r0 = std::abs(un0);
    cplx dir = ray;
    if (dir == cplx(0.0)) {
        if (r0 == 0.0) throw DomainError("shrinking_check: radial ray undefined at u_n = 0");
        dir = un0;
    }
    dir /= std::abs(dir);
    const double proj = (std::conj(un0) * dir).real();
    if (proj < 0.0) throw DomainError("shrinking_check: ray decreases |u_n|");

    std::vector<double> rs = reaches;
    std::sort(rs.begin(), rs.end());
    // rho(tau) = c (e^tau - 1) gives roughly uniform work per decade.
    const double c = std::max(r0, 1.0);
    auto tau_for = [&](double R) {
        const double rho = -proj + std::sqrt(std::max(0.0, proj * proj - r0 * r0 + R * R));
        return std::log1p(rho / c);
    };
    const CVector u0 = initial.u;
    RealRhs f = [&](double tau, const CVector& y, CVector& dy) {
        CVector u = u0;
        const double e = std::exp(tau);
        u(last) += c * (e - 1.0) * dir;
        dy = pack(jmms_rhs(u, unpack(y, n), last) * (c * e * dir));
    };
    OdeOptions oo;
    oo.rtol = opt.rtol;
    oo.atol = opt.atol;
    oo.max_steps = opt.max_steps;

    ShrinkingReport rep;
    CVector y = pack(initial.phi);
    double tau = 0.0;
    for (double R : rs) {
        if (R < r0) throw DomainError("shrinking_check: requested reach below the initial |u_n|");
        const double t1 = tau_for(R);
        try {
            if (t1 > tau) y = integrate(f, tau, t1, y, oo).final_state();
        } catch (const SingularityError& e) {
            rep.complete = false;
            const double ts = e.location().real();
            rep.singular_reach = std::abs(u0(last) + c * std::expm1(ts) * dir);
            rep.message = e.what();
            return rep;
        }
        tau = std::max(tau, t1);
        rep.samples.push_back({R, block_band(unpack(y, n), last)});
    }
    return rep;
}

}  // namespace isolab
