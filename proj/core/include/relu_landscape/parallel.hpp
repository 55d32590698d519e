#pragma once

#include <cstddef>
#include <functional>

namespace relu_landscape {

/// Worker count: RELU_LANDSCAPE_THREADS when set (clamped to >= 1),
/// otherwise the hardware concurrency.
unsigned worker_count();

/// Sum of term(0..n-1) with a fixed block decomposition and a pairwise tree
/// over block sums, so the result is bit-identical for any worker count.
double blocked_sum(std::size_t n, const std::function<double(std::size_t)>& term);

}  // namespace relu_landscape
