#pragma once

#include "isolab/types.hpp"

namespace isolab {

// Two log conventions are in use. Principal: Im log z in (-pi, pi], used for
// the x -> 0 asymptotics. NonnegImaginaryCut: cut along i*[0, inf), log real on
// the positive reals and Im log = -pi on the negative reals, used for the
// sector analysis at z = infinity.
enum class LogBranch { principal, nonneg_imaginary_cut };

struct BranchedLog {
    LogBranch cut = LogBranch::principal;
};

// Gamma on the complex plane. Lanczos (g = 7, 9 terms) for Re z >= 1/2,
// reflection otherwise. Throws PoleError within pole_tol of a nonpositive
// integer.
cplx gamma_c(cplx z, double pole_tol = 1e-12);

// Gamma(1 + z/2).
cplx gamma_hat(cplx z, double pole_tol = 1e-12);

// Nearest nonpositive integer if |z - n| < tol, else +1.
int near_nonpositive_integer(cplx z, double tol);

cplx branched_log(cplx z, LogBranch branch);

// exp(a * log z). Throws DomainError for z = 0 or z on the selected cut.
cplx cpow(cplx z, cplx a, LogBranch branch = LogBranch::principal);

// 1/z with a DomainError when |z| <= tol.
cplx guarded_inverse(cplx z, double tol, const char* what);

// Distance from z to the nearest integer (resp. even integer).
double distance_to_integer(cplx z);
double distance_to_even_integer(cplx z);

}  // namespace isolab
