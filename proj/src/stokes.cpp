#include "isolab/stokes.hpp"

#include <algorithm>
#include <cmath>

#include "isolab/linalg.hpp"
#include "isolab/special.hpp"

namespace isolab {

namespace {

CVector pack(const CMatrix& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }
CMatrix unpack(const CVector& v, Eigen::Index n) { return Eigen::Map<const CMatrix>(v.data(), n, n); }

ComplexRhs linear_rhs(const IrregularSystem& sys) {
    const Eigen::Index n = sys.phi.rows();
    return [&sys, n](cplx z, const CVector& y, CVector& dy) {
        const CMatrix F = unpack(y, n);
        CMatrix dF = sys.phi * F / z;
        for (Eigen::Index i = 0; i < n; ++i) dF.row(i) += sys.u(i) * F.row(i);
        dy = pack(dF);
    };
}

OdeOptions ode_options(const StokesOptions& opt) {
    OdeOptions o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    return o;
}

CMatrix transport(const IrregularSystem& sys, const ContourPath& path, const CMatrix& F0, const StokesOptions& opt) {
    const auto sol = integrate_path(linear_rhs(sys), path, pack(F0), ode_options(opt));
    return unpack(sol.y, sys.phi.rows());
}

double forbidden_max(const CMatrix& S, bool upper) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i)
        for (Eigen::Index j = 0; j < S.cols(); ++j)
            if ((upper && i > j) || (!upper && i < j)) m = std::max(m, std::abs(S(i, j)));
    return m;
}

}  // namespace

CVector default_u() {
    CVector u(3);
    u << cplx(0, 0), cplx(0, 1), cplx(0, 3);
    return u;
}

void validate_system(const IrregularSystem& sys) {
    require_valid(sys.phi, "stokes system");
    const Eigen::Index n = sys.phi.rows();
    if (sys.u.size() != n) throw DomainError("stokes: u and phi sizes differ");
    const double scale = std::max(1.0, sys.u.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(sys.u(i).real()) > 1e-12 * scale) throw DomainError("stokes: u must be purely imaginary");
        if (i > 0 && !(sys.u(i).imag() > sys.u(i - 1).imag())) {
            throw DomainError("stokes: Im u must be strictly increasing");
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const cplx d = sys.phi(i, i) - sys.phi(j, j);
            const double rd = std::round(d.real());
            if (rd != 0.0 && std::abs(d - rd) < 1e-9) {
                throw DomainError("stokes: resonant diagonal, phi_" + std::to_string(i + 1) + std::to_string(i + 1) +
                                  " - phi_" + std::to_string(j + 1) + std::to_string(j + 1) + " is a nonzero integer");
            }
        }
    }
}

std::vector<CMatrix> formal_series(const IrregularSystem& sys, int terms) {
    const Eigen::Index n = sys.phi.rows();
    const CVector lam = sys.phi.diagonal();
    std::vector<CMatrix> Y{CMatrix::Identity(n, n)};
    for (int k = 0; k < terms; ++k) {
        const CMatrix& Yk = Y.back();
        const CMatrix R = -double(k) * Yk + Yk * lam.asDiagonal() - sys.phi * Yk;
        CMatrix next = CMatrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j) next(i, j) = R(i, j) / (sys.u(i) - sys.u(j));
        for (Eigen::Index i = 0; i < n; ++i) {
            cplx s = 0.0;
            for (Eigen::Index l = 0; l < n; ++l)
                if (l != i) s += sys.phi(i, l) * next(l, i);
            next(i, i) = -s / double(k + 1);
        }
        Y.push_back(next);
    }
    return Y;
}

CanonicalSolution canonical_frame(const IrregularSystem& sys, Sector sector, const StokesOptions& opt) {
    validate_system(sys);
    const double R = opt.R;
    if (!(R > 0.0) || max_abs(sys.phi) / R >= 0.1) {
        throw AccuracyError("canonical_frame: R too small for |Phi|/R < 0.1", max_abs(sys.phi) / R);
    }
    const Eigen::Index n = sys.phi.rows();
    CanonicalSolution cs;
    cs.sector = sector;
    cs.R = R;
    cs.z0 = sector == Sector::plus ? cplx(R, 0.0) : cplx(-R, 0.0);
    const cplx lz = branched_log(cs.z0, LogBranch::nonneg_imaginary_cut);

    // Sum to the smallest term (optimal truncation of the divergent series).
    const auto Y = formal_series(sys, opt.max_series_terms);
    CMatrix S = Y[0];
    double prev = std::numeric_limits<double>::infinity();
    double last = 0.0;
    int used = 0;
    cplx zk = 1.0;
    for (int k = 1; k <= opt.max_series_terms; ++k) {
        zk /= cs.z0;
        const CMatrix term = Y[k] * zk;
        const double tn = max_abs(term);
        if (tn > prev) break;
        S += term;
        prev = tn;
        last = tn;
        used = k;
        if (tn < 1e-18 * max_abs(S)) break;
    }
    cs.series_terms = used;
    cs.series_residual = last;
    if (last > opt.series_tol) {
        throw AccuracyError("canonical_frame: formal series tail " + std::to_string(last) + " above tolerance", last);
    }
    CVector e(n);
    for (Eigen::Index i = 0; i < n; ++i) e(i) = std::exp(sys.phi(i, i) * lz + sys.u(i) * cs.z0);
    cs.frame = S * e.asDiagonal();
    return cs;
}

NumericStokes stokes_from_frames(const IrregularSystem& sys, const CanonicalSolution& fplus,
                                 const CanonicalSolution& fminus, const StokesOptions& opt) {
    validate_system(sys);
    if (fplus.sector != Sector::plus || fminus.sector != Sector::minus) {
        throw DomainError("stokes_from_frames: frames given in the wrong order");
    }
    if (fplus.R != fminus.R) throw DomainError("stokes_from_frames: frames anchored at different radii");
    const double R = fplus.R, r = opt.r;
    if (!(r > 0.0 && r < R)) throw ConfigError("stokes_from_frames: need 0 < r < R");
    const int segs = std::max(opt.arc_segments, 64);
    const Eigen::Index n = sys.phi.rows();

    // F+ clockwise: R -> r, lower half circle, -r -> -R.
    ContourPath lower{{cplx(R, 0.0)}};
    lower.line_to(cplx(r, 0.0)).then(ContourPath::arc(0.0, r, 0.0, -kPi, segs)).line_to(cplx(-R, 0.0));
    // F- clockwise: -R -> -r, upper half circle, r -> R.
    ContourPath upper{{cplx(-R, 0.0)}};
    upper.line_to(cplx(-r, 0.0)).then(ContourPath::arc(0.0, r, kPi, 0.0, segs)).line_to(cplx(R, 0.0));

    const CMatrix Fp_cont = transport(sys, lower, fplus.frame, opt);
    const CMatrix Fm_cont = transport(sys, upper, fminus.frame, opt);

    CVector em(n), ep(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        em(i) = std::exp(-kI * kPi * sys.phi(i, i));
        ep(i) = std::exp(kI * kPi * sys.phi(i, i));
    }
    NumericStokes out;
    out.stokes.s_plus = em.asDiagonal() * fminus.frame.partialPivLu().solve(Fp_cont);
    out.stokes.s_minus = fplus.frame.partialPivLu().solve(Fm_cont) * ep.asDiagonal();
    out.triangular_residual =
        std::max(forbidden_max(out.stokes.s_plus, true), forbidden_max(out.stokes.s_minus, false));
    for (Eigen::Index i = 0; i < n; ++i) {
        out.diagonal_residual = std::max({out.diagonal_residual, std::abs(out.stokes.s_plus(i, i) - em(i)),
                                          std::abs(out.stokes.s_minus(i, i) - em(i))});
    }
    out.series_residual = std::max(fplus.series_residual, fminus.series_residual);
    if (out.triangular_residual > opt.triangular_tol) {
        throw AccuracyError("stokes_from_frames: off-triangular residual " + std::to_string(out.triangular_residual),
                            out.triangular_residual);
    }
    return out;
}

NumericStokes compute_stokes(const IrregularSystem& sys, const StokesOptions& opt, bool check_monodromy) {
    const auto fp = canonical_frame(sys, Sector::plus, opt);
    const auto fm = canonical_frame(sys, Sector::minus, opt);
    NumericStokes out = stokes_from_frames(sys, fp, fm, opt);
    if (check_monodromy) {
        // One clockwise turn around z = 0 multiplies F+ by S- S+ on the right.
        const int segs = std::max(opt.arc_segments, 64);
        ContourPath loop{{cplx(opt.R, 0.0)}};
        loop.line_to(cplx(opt.r, 0.0)).then(ContourPath::arc(0.0, opt.r, 0.0, -2.0 * kPi, 2 * segs));
        loop.line_to(cplx(opt.R, 0.0));
        const CMatrix Floop = transport(sys, loop, fp.frame, opt);
        const CMatrix M = fp.frame.partialPivLu().solve(Floop);
        out.monodromy_residual = max_abs(M - out.stokes.s_minus * out.stokes.s_plus);
    }
    return out;
}

}  // namespace isolab
