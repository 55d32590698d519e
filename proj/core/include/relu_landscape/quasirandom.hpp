#pragma once

#include <cmath>
#include <cstdint>

#include "relu_landscape/linalg.hpp"

namespace relu_landscape {

/// splitmix64, used to derive independent sub-seeds deterministically.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Additive-recurrence low-discrepancy sequence (R_d, generalized golden
/// ratio) with a deterministic digital shift derived from the seed.
class KroneckerSequence {
public:
    KroneckerSequence(std::size_t dim, std::uint64_t seed = 0) : alpha_(dim), shift_(dim) {
        // phi_d solves x^(d+1) = x + 1.
        double phi = 2.0;
        for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1.0));
        double p = 1.0;
        std::uint64_t s = seed;
        for (std::size_t i = 0; i < dim; ++i) {
            p /= phi;
            alpha_[i] = p;
            shift_[i] = (splitmix64(s) >> 11) * 0x1.0p-53;
        }
    }

    /// n-th point in [0,1)^dim.
    Vec point(std::uint64_t n) const {
        Vec x(alpha_.size());
        for (std::size_t i = 0; i < alpha_.size(); ++i) {
            double v = shift_[i] + static_cast<double>(n + 1) * alpha_[i];
            x[i] = v - std::floor(v);
        }
        return x;
    }

private:
    Vec alpha_;
    Vec shift_;
};

}  // namespace relu_landscape
