#include "isolab/special.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace isolab {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::domain: return "domain";
        case ErrorCode::pole: return "pole";
        case ErrorCode::degenerate: return "degenerate";
        case ErrorCode::singularity: return "singularity";
        case ErrorCode::budget: return "budget";
        case ErrorCode::accuracy: return "accuracy";
        case ErrorCode::scaling: return "scaling";
        case ErrorCode::config: return "config";
    }
    return "unknown";
}

std::string format_complex(cplx z) {
    std::ostringstream os;
    os.precision(12);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

cplx lanczos(cplx z) {
    // Gamma(z) for Re z >= 1/2, evaluated in log form to avoid overflow of
    // t^(z-1/2) before the exponential damping is applied.
    z -= 1.0;
    cplx a = kLanczos[0];
    for (std::size_t k = 1; k < kLanczos.size(); ++k) a += kLanczos[k] / (z + double(k));
    const cplx t = z + kLanczosG + 0.5;
    const double half_log_2pi = 0.91893853320467274178;
    return std::exp(half_log_2pi + (z + 0.5) * std::log(t) - t) * a;
}

}  // namespace

int near_nonpositive_integer(cplx z, double tol) {
    if (z.real() > 0.5) return 1;
    const double n = std::round(z.real());
    if (std::abs(z - cplx(n, 0.0)) < tol) return static_cast<int>(n);
    return 1;
}

cplx gamma_c(cplx z, double pole_tol) {
    if (!is_finite(z)) throw DomainError("gamma_c: non-finite argument");
    const int n = near_nonpositive_integer(z, pole_tol);
    if (n <= 0) {
        throw PoleError("gamma_c: argument " + format_complex(z) + " at pole " + std::to_string(n), n);
    }
    if (z.real() >= 0.5) return lanczos(z);
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return kPi / (std::sin(kPi * z) * lanczos(1.0 - z));
}

cplx gamma_hat(cplx z, double pole_tol) { return gamma_c(1.0 + 0.5 * z, pole_tol); }

cplx branched_log(cplx z, LogBranch branch) {
    if (z == cplx(0.0, 0.0)) throw DomainError("log: zero argument");
    const double r = std::log(std::abs(z));
    double arg = std::arg(z);
    if (branch == LogBranch::nonneg_imaginary_cut) {
        if (z.real() == 0.0 && z.imag() > 0.0) {
            throw DomainError("log: argument " + format_complex(z) + " lies on the cut i*[0,inf)");
        }
        if (arg > 0.5 * kPi) arg -= 2.0 * kPi;
    }
    return {r, arg};
}

cplx cpow(cplx z, cplx a, LogBranch branch) {
    if (a == cplx(0.0, 0.0) && z != cplx(0.0, 0.0)) return 1.0;
    return std::exp(a * branched_log(z, branch));
}

cplx guarded_inverse(cplx z, double tol, const char* what) {
    if (std::abs(z) <= tol) throw DomainError(std::string("division by ~0 in ") + what);
    return 1.0 / z;
}

double distance_to_integer(cplx z) {
    return std::abs(z - cplx(std::round(z.real()), 0.0));
}

double distance_to_even_integer(cplx z) {
    return std::abs(z - cplx(2.0 * std::round(0.5 * z.real()), 0.0));
}

}  // namespace isolab
