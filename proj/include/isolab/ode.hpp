#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "isolab/types.hpp"

namespace isolab {

// dy/dt = f(t, y) over a real parameter.
using RealRhs = std::function<void(double t, const CVector& y, CVector& dydt)>;
// dy/dz = f(z, y) along a complex contour.
using ComplexRhs = std::function<void(cplx z, const CVector& y, CVector& dydz)>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    std::size_t max_steps = 2'000'000;
    double initial_step = 0.0;   // 0 selects the step automatically
    double max_step = 0.0;       // 0 means unbounded
    // A step below this fraction of the interval length is treated as a
    // singularity of the vector field.
    double min_step_fraction = 1e-13;
    bool keep_dense = false;
};

struct OdeStats {
    std::size_t steps = 0;
    std::size_t rejections = 0;
    std::size_t rhs_evals = 0;
};

// Dense output of one accepted step (4th-order continuous extension).
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<CVector, 5> r;
};

class OdeSolution {
public:
    std::vector<double> t;
    std::vector<CVector> y;
    std::vector<DenseStep> dense;
    OdeStats stats;

    const CVector& final_state() const { return y.back(); }
    // Interpolated state; requires keep_dense and t within the integrated range.
    CVector at(double tq) const;
};

// Real interval [t0, t1]; t1 < t0 integrates backwards.
OdeSolution integrate(const RealRhs& f, double t0, double t1, const CVector& y0, const OdeOptions& opt = {});

// A path in the complex plane given as a polyline, parameterized by arclength.
struct ContourPath {
    std::vector<cplx> vertices;

    double length() const;
    // Polyline approximating the arc center + radius*e^{i phi}, phi from a to b.
    static ContourPath arc(cplx center, double radius, double a, double b, int segments);
    ContourPath& then(const ContourPath& other);
    ContourPath& line_to(cplx z);
};

struct PathSolution {
    CVector y;
    OdeStats stats;
};

PathSolution integrate_path(const ComplexRhs& f, const ContourPath& path, const CVector& y0,
                            const OdeOptions& opt = {});

}  // namespace isolab
