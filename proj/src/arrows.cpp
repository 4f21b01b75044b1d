#include "isolab/arrows.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isolab/special.hpp"

namespace isolab {

namespace {

// Gamma with a labelled pole check at the arrow tolerance.
cplx G(cplx z, const char* label, const Tolerances& tol) {
    const int n = near_nonpositive_integer(z, tol.pole);
    if (n <= 0) {
        throw PoleError(std::string("Gamma pole in ") + label + ": argument " + format_complex(z) +
                            " is within tolerance of " + std::to_string(n),
                        n);
    }
    return gamma_c(z);
}

cplx Ghat(cplx z, const char* label, const Tolerances& tol) { return G(1.0 + 0.5 * z, label, tol); }

cplx epi(cplx z) { return std::exp(kI * kPi * z); }  // e^{i pi z}

void require_3x3(const CMatrix& A, const char* what) {
    require_valid(A, what);
    if (A.rows() != 3) throw DomainError(std::string(what) + ": expected a 3x3 matrix");
}

void throw_violations(const std::vector<GenericityViolation>& v, const char* what) {
    std::ostringstream os;
    os << what << ": genericity violated:";
    for (const auto& g : v) os << " [" << g.code << "] " << g.description << ";";
    throw DomainError(os.str());
}

// Conditions (b)-(d) on theta and sigma only; J is not involved.
std::vector<GenericityViolation> theta_sigma_violations(const Thetas& th, cplx s, double margin) {
    std::vector<GenericityViolation> out;
    const std::pair<const char*, cplx> thetas[] = {
        {"theta1", th.t1}, {"theta2", th.t2}, {"theta3", th.t3}, {"theta_inf", th.tinf}};
    for (const auto& [name, t] : thetas) {
        if (distance_to_integer(t) < margin) {
            out.push_back({std::string(name) + "_integer", std::string(name) + " = " + format_complex(t) + " is an integer"});
        }
    }
    const struct {
        const char* expr;
        cplx v;
    } eight[] = {
        {"theta1+theta2+sigma", th.t1 + th.t2 + s},     {"theta1+theta2-sigma", th.t1 + th.t2 - s},
        {"theta1-theta2+sigma", th.t1 - th.t2 + s},     {"theta1-theta2-sigma", th.t1 - th.t2 - s},
        {"theta_inf+theta3+sigma", th.tinf + th.t3 + s}, {"theta_inf+theta3-sigma", th.tinf + th.t3 - s},
        {"theta_inf-theta3+sigma", th.tinf - th.t3 + s}, {"theta_inf-theta3-sigma", th.tinf - th.t3 - s},
    };
    for (const auto& e : eight) {
        if (distance_to_even_integer(e.v) < margin) {
            out.push_back({std::string("even_") + e.expr, std::string(e.expr) + " = " + format_complex(e.v) +
                                                               " is an even integer"});
        }
    }
    const cplx sum = th.t1 + th.t2 + th.t3;
    if (std::abs(th.tinf) < margin) out.push_back({"theta_inf_zero", "theta_inf = 0"});
    if (std::abs(th.tinf - sum) < margin || std::abs(th.tinf + sum) < margin) {
        out.push_back({"theta_inf_sum", "theta_inf = +-(theta1+theta2+theta3)"});
    }
    return out;
}

// 2x2 minor of (P - a Id) on the given rows and columns.
cplx shifted_minor2(const CMatrix& P, cplx a, int r0, int r1, int c0, int c1) {
    auto e = [&](int i, int j) { return P(i, j) - (i == j ? a : cplx(0.0)); };
    return e(r0, c0) * e(r1, c1) - e(r0, c1) * e(r1, c0);
}

// phi_12/(phi_11 - a) times the minor, simplified with
// (phi_11 - a)(phi_22 - a) = phi_12 phi_21 so no division remains.
cplx ratio_times_minor(const CMatrix& P, cplx a, bool upper) {
    return upper ? P(0, 1) * P(1, 2) - P(0, 2) * (P(1, 1) - a) : P(1, 0) * P(2, 1) - P(2, 0) * (P(1, 1) - a);
}

std::vector<cplx> block_spectrum(const CMatrix& A, int k) {
    if (k == 1) return {A(0, 0)};
    if (k == 2) {
        const SpectrumPair p = eigen2(A);
        return {p.lambda1, p.lambda2};
    }
    return eigenvalues(A.topLeftCorner(k, k));
}

}  // namespace

std::array<cplx, 3> expected_spectrum(const Thetas& th) {
    const cplx s = th.t1 + th.t2 + th.t3;
    std::array<cplx, 3> v = {cplx(0.0), 0.5 * (th.tinf - s), 0.5 * (-th.tinf - s)};
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return v;
}

std::vector<GenericityViolation> validate_generic(const PviData& d, double margin) {
    std::vector<GenericityViolation> out;
    const cplx s = d.sigma;
    if (!(s.real() >= 0.0) || s.real() > 1.0 - margin) {
        out.push_back({"strip", "0 <= Re sigma < 1 fails for sigma = " + format_complex(s)});
    }
    if (std::abs(s) < margin) out.push_back({"sigma_zero", "sigma = 0"});
    if (std::abs(d.J) < margin) out.push_back({"J_zero", "J = 0"});
    auto rest = theta_sigma_violations(d.theta, s, margin);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

BoundaryValue arrow_q(const PviData& d, const ArrowOptions& opt) {
    const auto& [t1, t2, t3, ti] = d.theta;
    const cplx s = d.sigma, J = d.J;
    if (std::abs(s) < opt.tol.excluded) throw DomainError("arrow_q: sigma = 0, use arrow_q_sigma0");
    if (std::abs(J) < opt.tol.excluded) throw DomainError("arrow_q: J = 0");
    if (opt.require_generic) {
        const auto v = validate_generic(d, opt.tol.excluded);
        if (!v.empty()) throw_violations(v, "arrow_q");
    }
    const cplx s2 = s * s;
    CMatrix P(3, 3);
    P(0, 0) = -t1;
    P(1, 1) = -t2;
    P(2, 2) = -t3;
    P(0, 1) = 0.5 * (t1 - t2 - s);
    P(1, 0) = 0.5 * (-t1 + t2 - s);
    P(0, 2) = 0.5 * (-t3 - ti + s) - (t1 - t2 - s) * (t1 + t2 - s) * (t3 + ti + s) / (8.0 * s2 * J);
    P(2, 0) = 0.5 * J * (t3 - ti + s) - (-t1 + t2 - s) * (t1 + t2 + s) * (t3 - ti - s) / (8.0 * s2);
    P(1, 2) = 0.5 * (-t3 - ti + s) - (t1 - t2 + s) * (t1 + t2 - s) * (t3 + ti + s) / (8.0 * s2 * J);
    P(2, 1) = 0.5 * J * (-t3 + ti - s) - (t1 - t2 - s) * (t1 + t2 + s) * (t3 - ti - s) / (8.0 * s2);
    return {P, 1.0, 1.0};
}

BoundaryValue arrow_q_sigma0(const Thetas& th, cplx Jt, const ArrowOptions& opt) {
    const auto& [t1, t2, t3, ti] = th;
    const cplx q = t1 * t1 - t2 * t2;
    if (std::abs(t1 - t2) < opt.tol.excluded || std::abs(t1 + t2) < opt.tol.excluded) {
        throw DomainError("arrow_q_sigma0: requires theta1 != +-theta2");
    }
    if (opt.require_generic) {
        auto v = theta_sigma_violations(th, 0.0, opt.tol.excluded);
        // With sigma = 0 the eight numbers collapse to four; keep only the
        // theta-integrality and theta_inf conditions here.
        std::erase_if(v, [](const GenericityViolation& g) { return g.code.rfind("even_", 0) == 0; });
        if (!v.empty()) throw_violations(v, "arrow_q_sigma0");
    }
    CMatrix P(3, 3);
    P(0, 0) = -t1;
    P(1, 1) = -t2;
    P(2, 2) = -t3;
    P(0, 1) = 0.5 * (t1 - t2);
    P(1, 0) = 0.5 * (-t1 + t2);
    P(0, 2) = 1.0 + (t3 + ti) * (Jt - t1) / q;
    P(2, 0) = 0.25 * (t3 - ti) * (Jt + t1) - 0.25 * q;
    P(1, 2) = 1.0 + (t3 + ti) * (Jt + t2) / q;
    P(2, 1) = 0.25 * (t3 - ti) * (t2 - Jt) + 0.25 * q;
    return {P, 1.0, 1.0};
}

QInverseResult arrow_q_inverse(const BoundaryValue& b, std::optional<cplx> hint, const ArrowOptions& opt) {
    require_3x3(b.phi0, "arrow_q_inverse");
    const CMatrix& P = b.phi0;
    QInverseResult r;
    Thetas& th = r.data.theta;
    th.t1 = -P(0, 0);
    th.t2 = -P(1, 1);
    th.t3 = -P(2, 2);

    const SpectrumPair sp = eigen2(P, opt.tol.degeneracy);
    const cplx s = sp.sigma();
    if (sp.degenerate || std::abs(s) < opt.tol.excluded) {
        throw DegeneracyError("arrow_q_inverse: sigma^2 = 0 (repeated eigenvalues of the 2x2 block)");
    }
    if (s.real() >= 1.0) throw DomainError("arrow_q_inverse: Re sigma >= 1 violates the boundary condition");
    r.data.sigma = s;

    const cplx ti2 = 4.0 * (P(0, 1) * P(1, 0) + P(1, 2) * P(2, 1) + P(2, 0) * P(0, 2)) + th.t1 * th.t1 +
                     th.t2 * th.t2 + th.t3 * th.t3 - 2.0 * (th.t1 * th.t2 + th.t2 * th.t3 + th.t1 * th.t3);
    cplx ti = std::sqrt(ti2);
    if (std::abs(ti) < opt.tol.excluded) throw DegeneracyError("arrow_q_inverse: theta_inf^2 = 0");
    if (hint) {
        const double dp = std::abs(ti - *hint), dm = std::abs(-ti - *hint);
        if (std::abs(dp - dm) <= opt.tol.degeneracy * std::max(1.0, std::abs(ti))) {
            throw DegeneracyError("arrow_q_inverse: theta_inf hint does not select a sign");
        }
        if (dm < dp) ti = -ti;
    } else {
        if (ti.real() < 0.0 || (ti.real() == 0.0 && ti.imag() < 0.0)) ti = -ti;
        r.theta_inf_sign_conventional = true;
    }
    th.tinf = ti;

    const cplx pre = (ti + th.t3 - s) * (ti - th.t3 - s);
    if (std::abs(pre) < opt.tol.excluded) {
        throw DomainError("arrow_q_inverse: (theta_inf+theta3-sigma)(theta_inf-theta3-sigma) = 0");
    }
    const cplx rhs = (P(0, 2) * P(2, 0) - P(2, 1) * P(1, 2)) +
                     0.25 * (P(1, 1) - P(0, 0)) * (2.0 * P(2, 2) - P(0, 0) - P(1, 1)) +
                     (2.0 / s) * (P(0, 2) * P(2, 1) * P(1, 0) - P(1, 2) * P(2, 0) * P(0, 1)) +
                     (th.t1 * th.t1 - th.t2 * th.t2) * (th.t3 * th.t3 - ti * ti) / (4.0 * s * s);
    r.data.J = rhs / pre;
    return r;
}

StokesPair arrow_g(const BoundaryValue& b, const ArrowOptions& opt) {
    require_3x3(b.phi0, "arrow_g");
    const CMatrix& P = b.phi0;
    const Tolerances& tol = opt.tol;
    const SpectrumPair sp = eigen2(P, tol.degeneracy);
    if (sp.degenerate) throw DegeneracyError("arrow_g: lambda^(2)_1 = lambda^(2)_2");
    if (std::abs(sp.sigma().real()) >= 1.0) {
        throw DomainError("arrow_g: |Re(lambda^(2)_1 - lambda^(2)_2)| >= 1 violates the boundary condition");
    }
    const Spectrum3 L3 = eigen3(P, tol.degeneracy);
    const cplx l11 = P(0, 0), l12 = P(1, 1), l23 = P(2, 2);
    const cplx L[2] = {sp.lambda1, sp.lambda2};
    const cplx two_pi_i = 2.0 * kPi * kI;

    StokesPair out{CMatrix::Identity(3, 3), CMatrix::Identity(3, 3)};
    for (int k = 0; k < 3; ++k) {
        out.s_plus(k, k) = std::exp(-kI * kPi * P(k, k));
        out.s_minus(k, k) = out.s_plus(k, k);
    }

    out.s_plus(0, 1) = -two_pi_i * std::exp(-kI * kPi * l11) * P(0, 1) /
                       (G(1.0 + l11 - L[0], "(S+)12", tol) * G(1.0 + l11 - L[1], "(S+)12", tol));
    out.s_minus(1, 0) = -two_pi_i * std::exp(-kI * kPi * l12) * P(1, 0) /
                        (G(1.0 + L[0] - l11, "(S-)21", tol) * G(1.0 + L[1] - l11, "(S-)21", tol));

    cplx sp23 = 0.0, sp13 = 0.0, sm32 = 0.0, sm31 = 0.0;
    for (int i = 0; i < 2; ++i) {
        const cplx a = L[i], c = L[1 - i];
        // Gamma products over the 3x3 spectrum.
        cplx g3p = 1.0, g3m = 1.0;
        for (int l = 0; l < 3; ++l) {
            g3p *= G(1.0 + a - L3.values[l], "(S+)23/(S+)13", tol);
            g3m *= G(1.0 + L3.values[l] - a, "(S-)32/(S-)31", tol);
        }
        const cplx up = G(1.0 + a - c, "(S+)23/(S+)13", tol) * G(a - c, "(S+)23/(S+)13", tol);
        const cplx dn = G(1.0 + c - a, "(S-)32/(S-)31", tol) * G(c - a, "(S-)32/(S-)31", tol);
        const cplx m_plus = shifted_minor2(P, a, 0, 1, 0, 2);
        const cplx m_minus = shifted_minor2(P, a, 0, 2, 0, 1);

        sp23 += two_pi_i * std::exp(-kI * kPi * l12) * up / g3p * m_plus / G(1.0 + a - l11, "(S+)23", tol);
        sp13 += -two_pi_i * std::exp(-kI * kPi * a) * up / (g3p * G(1.0 + l11 - c, "(S+)13", tol)) *
                ratio_times_minor(P, a, true);
        sm32 += -two_pi_i * std::exp(-kI * kPi * l23) * dn / g3m * m_minus / G(1.0 + l11 - a, "(S-)32", tol);
        sm31 += two_pi_i * std::exp(kI * kPi * (l11 - a - l23)) * dn / (g3m * G(1.0 + c - l11, "(S-)31", tol)) *
                ratio_times_minor(P, a, false);
    }
    out.s_plus(1, 2) = sp23;
    out.s_plus(0, 2) = sp13;
    out.s_minus(2, 1) = sm32;
    out.s_minus(2, 0) = sm31;
    return out;
}

StokesPair arrow_g_subdiagonals(const CMatrix& phi0, const ArrowOptions& opt) {
    require_valid(phi0, "arrow_g_subdiagonals");
    const int n = static_cast<int>(phi0.rows());
    const Tolerances& tol = opt.tol;
    const cplx two_pi_i = 2.0 * kPi * kI;
    StokesPair out{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
    for (int k = 0; k < n; ++k) {
        out.s_plus(k, k) = std::exp(-kI * kPi * phi0(k, k));
        out.s_minus(k, k) = out.s_plus(k, k);
    }
    std::vector<std::vector<cplx>> lam(n + 1);
    for (int k = 1; k <= n; ++k) lam[k] = block_spectrum(phi0, k);

    for (int k = 1; k < n; ++k) {
        // 1-based k; rows/cols for the k x k minors, 0-based.
        std::vector<int> rows_p(k), cols_p(k), rows_m(k), cols_m(k);
        for (int j = 0; j < k - 1; ++j) rows_p[j] = cols_p[j] = rows_m[j] = cols_m[j] = j;
        rows_p[k - 1] = k - 1;
        cols_p[k - 1] = k;
        rows_m[k - 1] = k;
        cols_m[k - 1] = k - 1;

        cplx up_sum = 0.0, dn_sum = 0.0;
        for (int i = 0; i < k; ++i) {
            const cplx li = lam[k][i];
            cplx num_p = 1.0, num_m = 1.0, den_p = 1.0, den_m = 1.0;
            for (int l = 0; l < k; ++l) {
                if (l == i) continue;
                num_p *= G(1.0 + li - lam[k][l], "(S+)k,k+1", tol) * G(li - lam[k][l], "(S+)k,k+1", tol);
                num_m *= G(1.0 + lam[k][l] - li, "(S-)k+1,k", tol) * G(lam[k][l] - li, "(S-)k+1,k", tol);
            }
            for (int l = 0; l <= k; ++l) {
                den_p *= G(1.0 + li - lam[k + 1][l], "(S+)k,k+1", tol);
                den_m *= G(1.0 + lam[k + 1][l] - li, "(S-)k+1,k", tol);
            }
            for (int l = 0; l < k - 1; ++l) {
                den_p *= G(1.0 + li - lam[k - 1][l], "(S+)k,k+1", tol);
                den_m *= G(1.0 + lam[k - 1][l] - li, "(S-)k+1,k", tol);
            }
            const CMatrix shifted_p = li * CMatrix::Identity(n, n) - phi0;
            const CMatrix shifted_m = phi0 - li * CMatrix::Identity(n, n);
            up_sum += num_p / den_p * minor(shifted_p, rows_p, cols_p);
            dn_sum += num_m / den_m * minor(shifted_m, rows_m, cols_m);
        }
        // lambda^{(k-1)}_k = (Phi_0)_{kk}, lambda^{(k)}_{k+1} = (Phi_0)_{k+1,k+1}.
        out.s_plus(k - 1, k) = two_pi_i * std::exp(-kI * kPi * phi0(k - 1, k - 1)) * up_sum;
        out.s_minus(k, k - 1) = -two_pi_i * std::exp(-kI * kPi * phi0(k, k)) * dn_sum;
    }
    return out;
}

StokesPair arrow_g_direct(const PviData& d, cplx k1, cplx k2, const ArrowOptions& opt) {
    const auto& [t1, t2, t3, ti] = d.theta;
    const cplx s = d.sigma, J = d.J;
    const Tolerances& tol = opt.tol;
    if (k1 == cplx(0.0) || k2 == cplx(0.0)) throw DomainError("arrow_g_direct: gauge factors must be nonzero");
    // Corner entries (S+)13 and (S-)31 come from the 3x3 closed form at the
    // same gauge; the remaining entries use the explicit (sigma, J, theta) forms.
    BoundaryValue bv = arrow_q(d, opt);
    CVector K(3);
    K << k1, k2, 1.0;
    bv.phi0 = diag_conjugate(bv.phi0, K);
    bv.k1 = k1;
    bv.k2 = k2;
    const StokesPair corner = arrow_g(bv, opt);

    const cplx two_pi_i = 2.0 * kPi * kI;
    const cplx gs1 = G(1.0 - s, "Gamma(1-sigma)", tol), gs = G(s, "Gamma(sigma)", tol);

    const cplx sp12 = -(k1 / k2) * two_pi_i * epi(t1) * (t1 - t2 - s) /
                      (2.0 * G(1.0 + 0.5 * (t2 - t1 + s), "(S+)12", tol) * G(1.0 + 0.5 * (t2 - t1 - s), "(S+)12", tol));
    const cplx smi21 = -(k2 / k1) * two_pi_i * epi(-t1) * (t1 - t2 + s) /
                       (2.0 * G(1.0 - 0.5 * (t2 - t1 + s), "(S-^-1)21", tol) *
                        G(1.0 - 0.5 * (t2 - t1 - s), "(S-^-1)21", tol));

    const cplx a1 = gs1 * gs1 * (t3 + ti - s) /
                    (2.0 * G(1.0 - 0.5 * (t1 + t2 + s), "(S+)23(1)", tol) * G(1.0 + 0.5 * (t1 - t2 - s), "(S+)23(1)", tol) *
                     G(1.0 + 0.5 * (t3 + ti - s), "(S+)23(1)", tol) * G(1.0 + 0.5 * (t3 - ti - s), "(S+)23(1)", tol));
    const cplx b1 = gs * gs * (t2 - t1 + s) * (t1 + t2 + s) * (t3 - ti - s) /
                    (8.0 * G(1.0 + 0.5 * (t1 + t2 + s), "(S-)32(1)", tol) * G(1.0 - 0.5 * (t1 - t2 - s), "(S-)32(1)", tol) *
                     G(1.0 - 0.5 * (t3 + ti - s), "(S-)32(1)", tol) * G(1.0 - 0.5 * (t3 - ti - s), "(S-)32(1)", tol));
    const cplx a2 = gs * gs * (t1 - t2 + s) * (t1 + t2 - s) * (t3 + ti + s) /
                    (8.0 * J * G(1.0 - 0.5 * (t1 + t2 - s), "(S+)23(2)", tol) *
                     G(1.0 + 0.5 * (t1 - t2 + s), "(S+)23(2)", tol) * G(1.0 + 0.5 * (t3 + ti + s), "(S+)23(2)", tol) *
                     G(1.0 + 0.5 * (t3 - ti + s), "(S+)23(2)", tol));
    const cplx b2 = J * gs1 * gs1 * (-t3 + ti - s) /
                    (2.0 * G(1.0 + 0.5 * (t1 + t2 - s), "(S-)32(2)", tol) * G(1.0 - 0.5 * (t1 - t2 + s), "(S-)32(2)", tol) *
                     G(1.0 - 0.5 * (t3 + ti + s), "(S-)32(2)", tol) * G(1.0 - 0.5 * (t3 - ti + s), "(S-)32(2)", tol));
    const cplx sp23 = k2 * two_pi_i * epi(t2) * (a1 + a2);
    const cplx smi32 = (1.0 / k2) * two_pi_i * epi(-t2) * (b1 + b2);

    StokesPair out{CMatrix::Identity(3, 3), CMatrix::Zero(3, 3)};
    const cplx D[3] = {epi(t1), epi(t2), epi(t3)};
    for (int k = 0; k < 3; ++k) {
        out.s_plus(k, k) = D[k];
        out.s_minus(k, k) = D[k];
    }
    out.s_plus(0, 1) = sp12;
    out.s_plus(1, 2) = sp23;
    out.s_plus(0, 2) = corner.s_plus(0, 2);
    // Invert the lower-triangular S-^{-1} entries: T_ii = 1/D_i.
    out.s_minus(1, 0) = -smi21 * D[0] * D[1];
    out.s_minus(2, 1) = -smi32 * D[1] * D[2];
    out.s_minus(2, 0) = corner.s_minus(2, 0);
    return out;
}

MonodromyData with_theta_traces(cplx p12, cplx p13, cplx p23, const Thetas& th) {
    return {p12, p13, p23, 2.0 * std::cos(kPi * th.t1), 2.0 * std::cos(kPi * th.t2), 2.0 * std::cos(kPi * th.t3),
            2.0 * std::cos(kPi * th.tinf)};
}

MonodromyData arrow_p(const StokesPair& s, const Thetas& th, const ArrowOptions& opt) {
    require_3x3(s.s_plus, "arrow_p");
    require_3x3(s.s_minus, "arrow_p");
    const double tol = opt.tol.triangular;
    const double scale = std::max({1.0, max_abs(s.s_plus), max_abs(s.s_minus)});
    const cplx D[3] = {epi(th.t1), epi(th.t2), epi(th.t3)};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i > j && std::abs(s.s_plus(i, j)) > tol * scale) {
                throw DomainError("arrow_p: S+ is not upper triangular");
            }
            if (i < j && std::abs(s.s_minus(i, j)) > tol * scale) {
                throw DomainError("arrow_p: S- is not lower triangular");
            }
        }
        if (std::abs(s.s_plus(i, i) - D[i]) > tol * scale || std::abs(s.s_minus(i, i) - D[i]) > tol * scale) {
            throw DomainError("arrow_p: Stokes diagonals differ from e^{i pi theta_k}");
        }
    }
    const Eigen::Matrix3cd Sm = s.s_minus;
    const Eigen::Matrix3cd Smi = Sm.triangularView<Eigen::Lower>().solve(Eigen::Matrix3cd::Identity());
    const cplx t[3] = {th.t1, th.t2, th.t3};
    auto pij = [&](int i, int j) {
        return 2.0 * std::cos(kPi * (t[i] - t[j])) - s.s_plus(i, j) * Smi(j, i);
    };
    return with_theta_traces(pij(0, 1), pij(0, 2), pij(1, 2), th);
}

cplx sigma_from_trace(cplx p12) {
    // Principal arccos has Re in [0, pi]; fold to 0 <= Re sigma < 1 with the
    // Im >= 0 tie-break on the imaginary axis.
    cplx s = std::acos(0.5 * p12) / kPi;
    if (s.real() >= 1.0) s = 2.0 - s;
    if (s.real() < 0.0) s = -s;
    if (s.real() == 0.0 && s.imag() < 0.0) s = -s;
    return s;
}

ArrowFResult arrow_f(const MonodromyData& m, const Thetas& th, const ArrowOptions& opt) {
    const Tolerances& tol = opt.tol;
    if (std::abs(m.p12 - 2.0) < 1e-12 || std::abs(m.p12 + 2.0) < 1e-12) {
        throw DomainError("arrow_f: p12 = +-2 (sigma in {0, 1}) is outside the connection formula");
    }
    const cplx s = sigma_from_trace(m.p12);
    if (s.real() >= 1.0 - tol.excluded) throw DomainError("arrow_f: sigma on the boundary Re sigma = 1");
    if (opt.require_generic) {
        const auto v = theta_sigma_violations(th, s, tol.excluded);
        if (!v.empty()) throw_violations(v, "arrow_f");
    }
    const auto& [t1, t2, t3, ti] = th;
    ArrowFResult r;
    ConnectionCoefficients& c = r.coeffs;
    c.sigma = s;
    c.sigma13 = std::acos(0.5 * m.p13) / kPi;
    c.sigma23 = std::acos(0.5 * m.p23) / kPi;
    const cplx sn = std::sin(kPi * s);
    auto cs = [](cplx z) { return std::cos(kPi * z); };
    // cos(pi sigma_jk) = p_jk / 2 for either arccos branch.
    c.a = epi(s) * (kI * sn * (0.5 * m.p23) - cs(t2) * cs(ti) - cs(t1) * cs(t3));
    c.b = kI * sn * (0.5 * m.p13) + cs(t2) * cs(t3) + cs(ti) * cs(t1);
    c.d = 4.0 * std::sin(0.5 * kPi * (t1 + t2 - s)) * std::sin(0.5 * kPi * (t1 - t2 + s)) *
          std::sin(0.5 * kPi * (ti + t3 - s)) * std::sin(0.5 * kPi * (ti - t3 + s));
    const cplx g1 = G(1.0 - s, "c: Gamma(1-sigma)", tol), g2 = G(1.0 + s, "c: Gamma(1+sigma)", tol);
    c.c = g1 * g1 * Ghat(t1 + t2 + s, "c", tol) * Ghat(-t1 + t2 + s, "c", tol) * Ghat(ti + t3 + s, "c", tol) *
          Ghat(-ti + t3 + s, "c", tol) /
          (g2 * g2 * Ghat(t1 + t2 - s, "c", tol) * Ghat(-t1 + t2 - s, "c", tol) * Ghat(ti + t3 - s, "c", tol) *
           Ghat(-ti + t3 - s, "c", tol));
    if (std::abs(c.d) < 1e-300) throw DomainError("arrow_f: d = 0");
    c.s = (c.a + c.b) / c.d;
    c.s_hat = c.c * c.s;
    if (std::abs(c.s_hat) < 1e-300) throw DomainError("arrow_f: s_hat = 0");
    const cplx den = 4.0 * s * s * (ti + t3 - s) * c.s_hat;
    if (std::abs(den) < 1e-300) throw DomainError("arrow_f: theta_inf + theta3 - sigma = 0");
    r.data.theta = th;
    r.data.sigma = s;
    r.data.J = (t1 + t2 + s) * (-t1 + t2 + s) * (ti + t3 + s) / den;
    return r;
}

ClosedFormTraces p23_p13_closed_form(const PviData& d, const ArrowOptions& opt) {
    const auto& [t1, t2, t3, ti] = d.theta;
    const cplx s = d.sigma, J = d.J;
    const Tolerances& tol = opt.tol;
    if (distance_to_integer(s) < tol.excluded) throw DomainError("p23_p13_closed_form: sigma is an integer");
    if (opt.require_generic) {
        const auto v = validate_generic(d, tol.excluded);
        if (!v.empty()) throw_violations(v, "p23_p13_closed_form");
    }
    const cplx g1 = G(1.0 - s, "c", tol), g2 = G(1.0 + s, "c", tol);
    const cplx c = g1 * g1 * Ghat(t1 + t2 + s, "c", tol) * Ghat(-t1 + t2 + s, "c", tol) * Ghat(ti + t3 + s, "c", tol) *
                   Ghat(-ti + t3 + s, "c", tol) /
                   (g2 * g2 * Ghat(t1 + t2 - s, "c", tol) * Ghat(-t1 + t2 - s, "c", tol) *
                    Ghat(ti + t3 - s, "c", tol) * Ghat(-ti + t3 - s, "c", tol));
    const cplx L = 4.0 * s * s * (ti + t3 - s) * c / ((t1 + t2 + s) * (-t1 + t2 + s) * (ti + t3 + s));
    auto sn = [](cplx z) { return std::sin(0.5 * kPi * z); };
    auto cs = [](cplx z) { return std::cos(kPi * z); };
    const cplx S1 = sn(t1 + t2 + s) * sn(t1 - t2 - s) * sn(t3 + ti + s) * sn(t3 - ti + s);
    const cplx S2 = sn(t1 + t2 - s) * sn(t1 - t2 + s) * sn(t3 + ti - s) * sn(t3 - ti - s);
    const cplx ss = std::pow(std::sin(kPi * s), 2);
    const cplx LJ = L * J;
    ClosedFormTraces out;
    out.L = L;
    out.p23 = 2.0 / ss * (cs(t1) * cs(ti) + cs(t2) * cs(t3) - cs(t1) * cs(t3) * cs(s) - cs(t2) * cs(ti) * cs(s)) +
              4.0 * S1 / ss * LJ + 4.0 * S2 / ss / LJ;
    out.p13 = 2.0 / ss * (cs(t1) * cs(t3) + cs(t2) * cs(ti) - cs(t2) * cs(t3) * cs(s) - cs(t1) * cs(ti) * cs(s)) -
              4.0 * epi(s) * S1 / ss * LJ - 4.0 * epi(-s) * S2 / ss / LJ;
    return out;
}

double trace_identity_residual(const PviData& d, const ArrowOptions& opt) {
    const MonodromyData m = arrow_p(arrow_g(arrow_q(d, opt), opt), d.theta, opt);
    const ArrowFResult f = arrow_f(m, d.theta, opt);
    const ClosedFormTraces cf = p23_p13_closed_form(d, opt);
    const cplx lhs = f.coeffs.a + f.coeffs.b;
    const cplx rhs = f.coeffs.d / (cf.L * d.J);
    return std::abs(lhs - rhs);
}

cplx cubic_value(const MonodromyData& m) {
    const cplx &p12 = m.p12, &p13 = m.p13, &p23 = m.p23;
    const cplx &p1 = m.p1, &p2 = m.p2, &p3 = m.p3, &pi = m.pinf;
    return p13 * p23 * p12 + p12 * p12 + p23 * p23 + p13 * p13 - (p1 * p3 + p2 * pi) * p13 -
           (p3 * p2 + p1 * pi) * p23 - (p2 * p1 + p3 * pi) * p12 + p1 * p1 + p2 * p2 + p3 * p3 + pi * pi +
           p1 * p2 * p3 * pi - 4.0;
}

double cubic_residual(const MonodromyData& m) { return std::abs(cubic_value(m)); }

}  // namespace isolab
