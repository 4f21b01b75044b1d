#pragma once

#include <random>

#include "isolab/arrows.hpp"

namespace fixtures {

using isolab::cplx;
using isolab::CMatrix;

// Fully generic reference point.
inline isolab::PviData reference() { return {{0.21, 0.52, 0.63, 1.41}, 0.37, cplx(1.7, 0.2)}; }

// Same thetas with sigma = 0.31, where -theta1 + theta2 - sigma = 0.
inline isolab::PviData non_generic() { return {{0.21, 0.52, 0.63, 1.41}, 0.31, cplx(1.7, 0.2)}; }

// Ladder sets at Re sigma = 0.25, 0.5, 0.75.
inline isolab::PviData ladder_set(int k) {
    switch (k) {
        case 0: return {{0.21, 0.52, 0.63, 1.41}, 0.25, cplx(1.7, 0.2)};
        case 1: return {{0.21, 0.52, 0.63, 1.41}, 0.5, cplx(0.8, -0.4)};
        default: return {{0.11, 0.32, 0.23, 0.71}, 0.75, cplx(1.2, 0.5)};
    }
}

// Phi_0 of reference(), 40-digit evaluation.
inline CMatrix reference_phi0() {
    CMatrix P(3, 3);
    P << cplx(-0.21, 0), cplx(-0.34, 0), cplx(-0.52245228948162259, -0.036770318884514992),
        cplx(-0.03, 0), cplx(-0.52, 0), cplx(-0.8625777391633862, 0.0032444399015748521),
        cplx(-0.41780241051862671, -0.041), cplx(-0.436927319211103, 0.041), cplx(-0.63, 0);
    return P;
}

// Stokes matrices of reference_phi0(), 40-digit evaluation.
inline CMatrix reference_s_plus() {
    CMatrix S(3, 3);
    S << cplx(0.79015501237569041, 0.61290705365297649), cplx(-1.441242037083946, 1.8580380383307082),
        cplx(-2.1580539097968376, -1.4929183455214985),
        0, cplx(-0.062790519529313374, 0.99802672842827156), cplx(-2.1076633222969297, -0.12148046285707523),
        0, 0, cplx(-0.39714789063478062, 0.91775462568398114);
    return S;
}

inline CMatrix reference_s_minus() {
    CMatrix S(3, 3);
    S << cplx(0.79015501237569041, 0.61290705365297649), 0, 0,
        cplx(-0.14000513813824678, -0.0088083766797690654), cplx(-0.062790519529313374, 0.99802672842827156), 0,
        cplx(0.60786689177153541, 0.2048739714476778), cplx(-1.6872244842603379, -0.84581624063105465),
        cplx(-0.39714789063478062, 0.91775462568398114);
    return S;
}

// p12, p13, p23 of the reference point.
inline const cplx kRefP12{0.79429578126956124, 0.0};
inline const cplx kRefP13{0.033945493059204732, 1.6660928427312314};
inline const cplx kRefP23{-2.0975758104847082, -0.20323008050763539};

inline CMatrix random_matrix(std::mt19937_64& g, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> U(-scale, scale);
    CMatrix A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = cplx(U(g), U(g));
    return A;
}

}  // namespace fixtures
