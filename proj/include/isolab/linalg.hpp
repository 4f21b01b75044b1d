#pragma once

#include <array>
#include <span>
#include <vector>

#include "isolab/special.hpp"
#include "isolab/types.hpp"

namespace isolab {

// Eigenvalues of a 2x2 block, ordered Re(lambda1 - lambda2) >= 0 with ties
// broken by Im(lambda1 - lambda2) >= 0.
struct SpectrumPair {
    cplx lambda1;
    cplx lambda2;
    bool degenerate = false;
    cplx sigma() const { return lambda1 - lambda2; }
};

struct Spectrum3 {
    std::array<cplx, 3> values;
    bool degenerate = false;
};

// Relative tolerance used to flag coincident eigenvalues.
inline constexpr double kDefaultDegeneracyTol = 1e-8;

// Throws DomainError if A is not square, empty, or has non-finite entries.
void require_valid(const CMatrix& A, const char* what);

// Keep (i,j) iff i,j < k (0-based) or i == j.
CMatrix delta_k(const CMatrix& A, int k);

// Orders a root pair per SpectrumPair.
SpectrumPair order_pair(cplx a, cplx b, double degeneracy_tol = kDefaultDegeneracyTol);

SpectrumPair eigen2(const Eigen::Matrix2cd& block, double degeneracy_tol = kDefaultDegeneracyTol);
// Upper-left 2x2 block of A.
SpectrumPair eigen2(const CMatrix& A, double degeneracy_tol = kDefaultDegeneracyTol);

// Characteristic-cubic roots via the companion matrix, sorted by descending
// real part then descending imaginary part.
Spectrum3 eigen3(const CMatrix& A, double degeneracy_tol = kDefaultDegeneracyTol);

// All eigenvalues, sorted as in eigen3. General n.
std::vector<cplx> eigenvalues(const CMatrix& A);

// Coefficients c of det(lambda - A) = lambda^n + c[n-1] lambda^(n-1) + ... + c[0].
std::vector<cplx> characteristic_polynomial(const CMatrix& A);
cplx eval_monic(const std::vector<cplx>& c, cplx lambda);

// Determinant of A restricted to rows x cols (0-based, strictly increasing).
cplx minor(const CMatrix& A, std::span<const int> rows, std::span<const int> cols);

// K A K^{-1}, or K^{-1} A K when invert is set.
CMatrix diag_conjugate(const CMatrix& A, const CVector& K, bool invert = false);

// s^A for A of delta_2 shape: a 2x2 upper-left block plus a diagonal tail.
CMatrix matrix_power_scalar(const CMatrix& A, cplx s, LogBranch branch = LogBranch::principal,
                            double degeneracy_tol = kDefaultDegeneracyTol);

// s^D for diagonal D = diag(d).
CMatrix diag_power(const CVector& d, cplx s, LogBranch branch = LogBranch::principal);

double max_abs(const CMatrix& A);

}  // namespace isolab
