#include "isolab/harness/sampler.hpp"

#include <cmath>

namespace isolab {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t draw) {
    const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ index) ^ draw);
    return double(h >> 11) * 0x1.0p-53;
}

namespace {

double in(const Range& r, std::uint64_t seed, std::uint64_t index, std::uint64_t draw) {
    return r.lo + (r.hi - r.lo) * uniform01(seed, index, draw);
}

}  // namespace

PviData draw_sample(const SampleSpec& spec, std::uint64_t seed, std::uint64_t index) {
    if (!(spec.margin > 0.0)) throw ConfigError("sampler: genericity margin must be positive");
    if (spec.sigma_re.lo < 0.0 || spec.sigma_re.hi >= 1.0 || spec.sigma_re.lo > spec.sigma_re.hi) {
        throw ConfigError("sampler: Re sigma range must lie in [0, 1)");
    }
    constexpr std::uint64_t kDrawsPerAttempt = 16;
    for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
        const std::uint64_t b = std::uint64_t(attempt) * kDrawsPerAttempt;
        auto th = [&](std::uint64_t k) {
            return cplx(in(spec.theta_re, seed, index, b + 2 * k), in(spec.theta_im, seed, index, b + 2 * k + 1));
        };
        PviData d;
        d.theta = {th(0), th(1), th(2), th(3)};
        d.sigma = {in(spec.sigma_re, seed, index, b + 8), in(spec.sigma_im, seed, index, b + 9)};
        const double jr = in(spec.j_abs, seed, index, b + 10);
        const double ja = 2.0 * kPi * uniform01(seed, index, b + 11);
        d.J = std::polar(jr, ja);
        const auto& t = d.theta;
        if (std::max({std::abs(t.t1), std::abs(t.t2), std::abs(t.t3), std::abs(t.tinf), std::abs(d.J)}) >
            spec.max_modulus) {
            continue;
        }
        if (validate_generic(d, spec.margin).empty()) return d;
    }
    throw ConfigError("sampler: no generic sample found within the attempt budget; widen ranges or lower the margin");
}

std::vector<PviData> draw_samples(const SampleSpec& spec, std::uint64_t seed, std::size_t count) {
    std::vector<PviData> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(draw_sample(spec, seed, i));
    return out;
}

}  // namespace isolab
