#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "relu_landscape/measures.hpp"
#include "relu_landscape/networks.hpp"

namespace relu_landscape {

/// Step size base / (1 + decay * t); base = 0 freezes the parameters.
struct StepSchedule {
    double base = 0.1;
    double decay = 0.0;

    double at(int t) const { return base / (1.0 + decay * static_cast<double>(t)); }
};

struct TrainConfig {
    StepSchedule schedule;
    int budget = 1000;
    std::uint64_t seed = 0;
    double diverge_norm_threshold = 50.0;  // sup-norm threshold for the divergence verdict
    int diverge_window = 20;               // trailing err checkpoints that must be non-increasing
    double converge_grad_tol = 1e-9;       // sup-norm of the err gradient
    int snapshot_every = 0;                // 0 = keep no parameter snapshots
};

enum class Verdict { converged, norm_diverging, budget_exhausted };

struct TrainStep {
    int iter = 0;
    double err = 0.0;
    double norm_inf = 0.0;  // max absolute parameter entry
    double step_size = 0.0;
};

struct TrainRecord {
    std::vector<TrainStep> steps;
    std::vector<std::pair<int, NetworkConfig>> snapshots;
    NetworkConfig final_config;
    Verdict verdict = Verdict::budget_exhausted;
};

/// Gradient of eval_error in parameter space: the quadrature sum of
/// dL/dy(x, N(x)) * grad_W N(x) * h(x), i.e. the exact gradient of the
/// discretized error off kinks.
NetworkGradient err_gradient(const ProblemInstance& instance, const NetworkConfig& w,
                             const QuadratureGrid& grid);

/// Plain subgradient descent W <- W - eta_t * err_gradient. Records err and
/// parameter sup-norm each iteration. Verdicts: `norm_diverging` once the
/// sup-norm exceeds the threshold while err was non-increasing over the
/// trailing window, `converged` when the gradient sup-norm drops below
/// converge_grad_tol, otherwise `budget_exhausted`.
TrainRecord subgradient_descent(const ProblemInstance& instance, const NetworkConfig& start,
                                const TrainConfig& config, const QuadratureGrid& grid);

/// Coordinate pattern search with shrinking step (0.5 down to 1e-6).
NetworkConfig pattern_search(const ProblemInstance& instance, NetworkConfig w,
                             const QuadratureGrid& grid, double step0 = 0.5,
                             double step_min = 1e-6, int max_sweeps_per_level = 50);

struct SearchResult {
    NetworkConfig config;
    double err = 0.0;
};

/// Best-of over `restarts` random initializations (entries i.i.d. uniform on
/// [-1,1] scaled by 1/sqrt(d_in+1)), each descended and then polished by
/// pattern search. Returns an upper bound estimate of err_d. Deterministic
/// for a fixed seed; ties keep the lowest restart index.
SearchResult multistart_min(const ProblemInstance& instance, std::size_t d_in, std::size_t width,
                            int restarts, const TrainConfig& config, const QuadratureGrid& grid);

struct NeuronGain {
    double first_order_max = 0.0;  // max |integral dL/dy(x, N(x)) (n.x - o)^+ h dx|
    double gain = 0.0;             // err(W) - best widened err, clamped at 0
    EffectiveNeuron best;          // (normal, offset, kink) of the best added neuron
};

/// First-order test and direct gain of adding one ReLU neuron to W. The
/// (normal, offset) grid is 64 directions x 33 offsets spanning the box
/// (+-e_1 in one dimension); for each pair the added kink is optimized by
/// bracketing plus golden section capped at `search_budget` evaluations.
NeuronGain neuron_gain(const ProblemInstance& instance, const NetworkConfig& w,
                       const QuadratureGrid& grid, int search_budget = 120);

}  // namespace relu_landscape
