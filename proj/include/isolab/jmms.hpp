#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isolab/types.hpp"

namespace isolab {

struct JmmsState {
    CVector u;   // n distinct deformation times
    CMatrix phi; // n x n
};

// Throws DomainError if u has coincident entries (within tol) or shapes mismatch.
void require_off_diagonal(const JmmsState& s, double tol = 1e-12);

// dPhi/du_k evaluated case by case (i, j != k; j = k; i = k; diagonal zero).
// k is 0-based.
CMatrix jmms_rhs(const CVector& u, const CMatrix& phi, int k);

// The same vector field as [[D_k, [E_k, Phi]], Phi] with
// (D_k)_bb = 1/(u_b - u_k), (D_k)_kk = 0 and E_k the k-th matrix unit.
CMatrix jmms_rhs_commutator(const CVector& u, const CMatrix& phi, int k);

struct FlowOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    std::size_t max_steps = 2'000'000;
    double fat_diagonal_tol = 1e-9;
};

// Transports Phi along u_k -> u_k + t delta_u, t in [0, 1].
JmmsState flow(const JmmsState& initial, int k, cplx delta_u, const FlowOptions& opt = {});

struct BandSample {
    double reach = 0.0;  // |u_n| at the sample
    double band = 0.0;   // max |Re(lambda_i - lambda_j)| over the upper-left (n-1) block
};

struct ShrinkingReport {
    std::vector<BandSample> samples;
    bool complete = true;  // false when the flow hit a singularity
    std::optional<double> singular_reach;
    std::string message;
};

// Moves u_n along the straight ray u_n(0) + rho * ray/|ray|, rho >= 0 (ray = 0
// means radially outward), and samples the band when |u_n| reaches each value
// in `reaches`. The ray must not decrease |u_n|.
ShrinkingReport shrinking_check(const JmmsState& initial, cplx ray, const std::vector<double>& reaches,
                                const FlowOptions& opt = {});

// Band of the upper-left m x m block.
double block_band(const CMatrix& phi, int m);

// Max distance between the spectra of A and B after optimal greedy matching.
double spectral_distance(const CMatrix& A, const CMatrix& B);

}  // namespace isolab
