#pragma once

#include <cstdint>
#include <vector>

#include "isolab/arrows.hpp"

namespace isolab {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct SampleSpec {
    Range theta_re{-1.5, 1.5};
    Range theta_im{-0.3, 0.3};
    Range sigma_re{0.05, 0.95};
    Range sigma_im{-0.3, 0.3};
    Range j_abs{0.2, 2.0};
    double max_modulus = 2.0;   // bound on |theta_j| and |J|
    double margin = 0.02;       // minimum distance to every excluded set
    int max_attempts = 10000;   // per sample
};

// Counter-based generator: the value depends only on (seed, index, draw).
std::uint64_t splitmix64(std::uint64_t x);
double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t draw);

// Sample `index` of the stream `seed`; passes validate_generic(d, margin).
// Throws ConfigError if the margin is not positive or no draw qualifies.
PviData draw_sample(const SampleSpec& spec, std::uint64_t seed, std::uint64_t index);

std::vector<PviData> draw_samples(const SampleSpec& spec, std::uint64_t seed, std::size_t count);

}  // namespace isolab
