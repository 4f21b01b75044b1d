#pragma once

#include "isolab/arrows.hpp"
#include "isolab/ode.hpp"
#include "isolab/types.hpp"

namespace isolab {

// dF/dz = (U + Phi/z) F with U = diag(u).
struct IrregularSystem {
    CVector u;   // purely imaginary, strictly increasing imaginary parts
    CMatrix phi;
};

// Checks shape, imaginary u with increasing Im, and the absence of nonzero
// integer differences on diag(Phi).
void validate_system(const IrregularSystem& sys);

struct StokesOptions {
    double R = 40.0;        // anchor radius of the canonical frames
    double r = 1.0;         // radius of the keyhole around z = 0
    int arc_segments = 64;  // polygon segments on each half circle
    double rtol = 1e-12;
    double atol = 1e-14;
    int max_series_terms = 60;
    double series_tol = 1e-10;      // required tail estimate of the formal series
    double triangular_tol = 1e-5;   // above this the extraction is rejected
};

enum class Sector { plus, minus };

struct CanonicalSolution {
    Sector sector = Sector::plus;
    double R = 0.0;
    cplx z0;            // +R or -R
    CMatrix frame;      // F(z0)
    double series_residual = 0.0;
    int series_terms = 0;
};

// Coefficients Y_0 = Id, Y_1, ..., Y_N of the formal solution
// (sum Y_k z^{-k}) z^{delta Phi} e^{U z}.
std::vector<CMatrix> formal_series(const IrregularSystem& sys, int terms);

// F(z0) on the sector bisector from the formal series summed to its smallest
// term; the log of z uses the cut along the nonnegative imaginary axis.
CanonicalSolution canonical_frame(const IrregularSystem& sys, Sector sector, const StokesOptions& opt = {});

struct NumericStokes {
    StokesPair stokes;
    double triangular_residual = 0.0;  // max modulus in the forbidden triangles
    double diagonal_residual = 0.0;    // max |S_kk - e^{-i pi phi_kk}|
    double series_residual = 0.0;
    double monodromy_residual = -1.0;  // < 0 when not computed
};

// Continues F+ clockwise to the negative axis and F- clockwise to the positive
// axis along the keyhole path and reads off S+ and S-.
NumericStokes stokes_from_frames(const IrregularSystem& sys, const CanonicalSolution& fplus,
                                 const CanonicalSolution& fminus, const StokesOptions& opt = {});

// Frames plus extraction; when `check_monodromy` is set, also continues F+
// once clockwise around z = 0 and compares with F+ S- S+.
NumericStokes compute_stokes(const IrregularSystem& sys, const StokesOptions& opt = {}, bool check_monodromy = false);

// Default configuration u = i diag(0, 1, 3).
CVector default_u();

}  // namespace isolab
