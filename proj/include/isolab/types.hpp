#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace isolab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr cplx kI{0.0, 1.0};

// Error categories shared by every module. The C API maps them 1:1 to
// isolab_status codes.
enum class ErrorCode {
    domain,
    pole,
    degenerate,
    singularity,
    budget,
    accuracy,
    scaling,
    config,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

// Gamma pole; carries the nearest nonpositive integer.
class PoleError : public Error {
public:
    PoleError(const std::string& what, int nearest)
        : Error(ErrorCode::pole, what), nearest_(nearest) {}
    int nearest() const noexcept { return nearest_; }

private:
    int nearest_;
};

class DegeneracyError : public Error {
public:
    explicit DegeneracyError(const std::string& what) : Error(ErrorCode::degenerate, what) {}
};

// Integrator step collapse or a singular value of the vector field.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, cplx location)
        : Error(ErrorCode::singularity, what), location_(location) {}
    cplx location() const noexcept { return location_; }

private:
    cplx location_;
};

class BudgetError : public Error {
public:
    explicit BudgetError(const std::string& what) : Error(ErrorCode::budget, what) {}
};

class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double residual)
        : Error(ErrorCode::accuracy, what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class ScalingError : public Error {
public:
    explicit ScalingError(const std::string& what) : Error(ErrorCode::scaling, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string format_complex(cplx z);

}  // namespace isolab
