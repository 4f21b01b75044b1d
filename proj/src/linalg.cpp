#include "isolab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace isolab {

namespace {

bool descending(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

bool pair_is_degenerate(cplx a, cplx b, double tol) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) < tol * scale;
}

}  // namespace

void require_valid(const CMatrix& A, const char* what) {
    if (A.rows() == 0 || A.rows() != A.cols()) {
        throw DomainError(std::string(what) + ": matrix must be square with n >= 1");
    }
    for (Eigen::Index i = 0; i < A.size(); ++i) {
        if (!is_finite(A.data()[i])) throw DomainError(std::string(what) + ": non-finite entry");
    }
}

CMatrix delta_k(const CMatrix& A, int k) {
    require_valid(A, "delta_k");
    const int n = static_cast<int>(A.rows());
    if (k < 0 || k > n) throw DomainError("delta_k: k out of range [0, n]");
    CMatrix out = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if ((i < k && j < k) || i == j) out(i, j) = A(i, j);
        }
    }
    return out;
}

SpectrumPair order_pair(cplx a, cplx b, double degeneracy_tol) {
    const cplx d = a - b;
    const bool swap = d.real() < 0.0 || (d.real() == 0.0 && d.imag() < 0.0);
    SpectrumPair p{swap ? b : a, swap ? a : b, false};
    p.degenerate = pair_is_degenerate(a, b, degeneracy_tol);
    return p;
}

SpectrumPair eigen2(const Eigen::Matrix2cd& m, double degeneracy_tol) {
    for (int i = 0; i < 4; ++i) {
        if (!is_finite(m.data()[i])) throw DomainError("eigen2: non-finite entry");
    }
    const cplx half_tr = 0.5 * (m(0, 0) + m(1, 1));
    // sqrt of the discriminant (a-d)^2/4 + bc; avoids cancellation in tr^2 - 4det.
    const cplx h = 0.5 * (m(0, 0) - m(1, 1));
    const cplx root = std::sqrt(h * h + m(0, 1) * m(1, 0));
    return order_pair(half_tr + root, half_tr - root, degeneracy_tol);
}

SpectrumPair eigen2(const CMatrix& A, double degeneracy_tol) {
    require_valid(A, "eigen2");
    if (A.rows() < 2) throw DomainError("eigen2: need n >= 2");
    return eigen2(Eigen::Matrix2cd(A.topLeftCorner(2, 2)), degeneracy_tol);
}

std::vector<cplx> characteristic_polynomial(const CMatrix& A) {
    require_valid(A, "characteristic_polynomial");
    // Faddeev-LeVerrier; exact enough for the small n used here.
    const Eigen::Index n = A.rows();
    std::vector<cplx> c(n + 1);
    c[n] = 1.0;
    CMatrix M = CMatrix::Zero(n, n);
    const CMatrix I = CMatrix::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        M = A * M + c[n - k + 1] * I;
        c[n - k] = -(A * M).trace() / double(k);
    }
    c.pop_back();
    return c;
}

cplx eval_monic(const std::vector<cplx>& c, cplx lambda) {
    cplx v = 1.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * lambda + *it;
    return v;
}

Spectrum3 eigen3(const CMatrix& A, double degeneracy_tol) {
    require_valid(A, "eigen3");
    if (A.rows() != 3) throw DomainError("eigen3: need a 3x3 matrix");
    const auto c = characteristic_polynomial(A);
    Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    for (int i = 0; i < 3; ++i) companion(i, 2) = -c[i];
    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw DegeneracyError("eigen3: QR iteration failed");
    Spectrum3 out;
    for (int i = 0; i < 3; ++i) {
        // One Newton polish on the cubic; harmless for simple roots and
        // skipped when the derivative is tiny (clustered roots).
        cplx r = solver.eigenvalues()(i);
        const cplx p = eval_monic(c, r);
        const cplx dp = 3.0 * r * r + 2.0 * c[2] * r + c[1];
        if (std::abs(dp) > 1e-6 * std::max(1.0, std::abs(r) * std::abs(r))) r -= p / dp;
        out.values[i] = r;
    }
    std::sort(out.values.begin(), out.values.end(), descending);
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            if (pair_is_degenerate(out.values[i], out.values[j], degeneracy_tol)) out.degenerate = true;
        }
    }
    return out;
}

std::vector<cplx> eigenvalues(const CMatrix& A) {
    require_valid(A, "eigenvalues");
    Eigen::ComplexEigenSolver<CMatrix> solver(A, false);
    if (solver.info() != Eigen::Success) throw DegeneracyError("eigenvalues: QR iteration failed");
    std::vector<cplx> v(solver.eigenvalues().data(), solver.eigenvalues().data() + A.rows());
    std::sort(v.begin(), v.end(), descending);
    return v;
}

cplx minor(const CMatrix& A, std::span<const int> rows, std::span<const int> cols) {
    require_valid(A, "minor");
    const int n = static_cast<int>(A.rows());
    if (rows.size() != cols.size() || rows.empty() || static_cast<int>(rows.size()) > n) {
        throw DomainError("minor: row/column lists must be nonempty, equal length, at most n");
    }
    auto check = [n](std::span<const int> idx) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] < 0 || idx[i] >= n) throw DomainError("minor: index out of range");
            if (i > 0 && idx[i] <= idx[i - 1]) throw DomainError("minor: indices must be strictly increasing");
        }
    };
    check(rows);
    check(cols);
    const auto m = static_cast<Eigen::Index>(rows.size());
    CMatrix sub(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = A(rows[i], cols[j]);
    }
    if (m == 1) return sub(0, 0);
    if (m == 2) return sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0);
    return sub.partialPivLu().determinant();
}

CMatrix diag_conjugate(const CMatrix& A, const CVector& K, bool invert) {
    require_valid(A, "diag_conjugate");
    if (K.size() != A.rows()) throw DomainError("diag_conjugate: gauge size mismatch");
    for (Eigen::Index i = 0; i < K.size(); ++i) {
        if (K(i) == cplx(0.0, 0.0) || !is_finite(K(i))) {
            throw DomainError("diag_conjugate: gauge entry must be finite and nonzero");
        }
    }
    CMatrix out(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            out(i, j) = invert ? A(i, j) * K(j) / K(i) : A(i, j) * K(i) / K(j);
        }
    }
    return out;
}

CMatrix diag_power(const CVector& d, cplx s, LogBranch branch) {
    const cplx ls = branched_log(s, branch);
    CMatrix out = CMatrix::Zero(d.size(), d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) out(i, i) = std::exp(d(i) * ls);
    return out;
}

CMatrix matrix_power_scalar(const CMatrix& A, cplx s, LogBranch branch, double degeneracy_tol) {
    require_valid(A, "matrix_power_scalar");
    const Eigen::Index n = A.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const bool in_block = i < 2 && j < 2;
            if (!in_block && i != j && A(i, j) != cplx(0.0, 0.0)) {
                throw DomainError("matrix_power_scalar: matrix is not of delta_2 shape");
            }
        }
    }
    const cplx ls = branched_log(s, branch);
    CMatrix out = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) out(i, i) = std::exp(A(i, i) * ls);
    if (n < 2 || (A(0, 1) == cplx(0.0, 0.0) && A(1, 0) == cplx(0.0, 0.0))) return out;

    const SpectrumPair sp = eigen2(Eigen::Matrix2cd(A.topLeftCorner(2, 2)), degeneracy_tol);
    if (sp.degenerate) throw DegeneracyError("matrix_power_scalar: repeated eigenvalues in the 2x2 block");
    // Spectral projectors P_k = (A - l_other)/(l_k - l_other) on the block.
    const Eigen::Matrix2cd B = A.topLeftCorner(2, 2);
    const Eigen::Matrix2cd I2 = Eigen::Matrix2cd::Identity();
    const cplx gap = sp.lambda1 - sp.lambda2;
    const Eigen::Matrix2cd P1 = (B - sp.lambda2 * I2) / gap;
    const Eigen::Matrix2cd P2 = (sp.lambda1 * I2 - B) / gap;
    out.topLeftCorner(2, 2) = std::exp(sp.lambda1 * ls) * P1 + std::exp(sp.lambda2 * ls) * P2;
    return out;
}

double max_abs(const CMatrix& A) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < A.size(); ++i) m = std::max(m, std::abs(A.data()[i]));
    return m;
}

}  // namespace isolab
