#include "relu_landscape/training.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "relu_landscape/quasirandom.hpp"

namespace relu_landscape {

namespace {

bool all_finite(const NetworkConfig& w) {
    for (const Vec& col : w.w1)
        for (double v : col)
            if (!std::isfinite(v)) return false;
    for (double v : w.w2)
        if (!std::isfinite(v)) return false;
    for (double v : w.bias)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

NetworkGradient err_gradient(const ProblemInstance& instance, const NetworkConfig& w,
                             const QuadratureGrid& grid) {
    validate(w);
    NetworkGradient g = zero_network(w.d_in(), w.width());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec& x = grid.nodes[i];
        const double h = instance.density(x);
        if (h == 0.0) continue;
        const double y = eval_response(w, x);
        const double scale = grid.weights[i] * h * instance.loss.dy(x, y);
        if (scale != 0.0) accumulate_response_subgradient(w, x, scale, g);
    }
    return g;
}

TrainRecord subgradient_descent(const ProblemInstance& instance, const NetworkConfig& start,
                                const TrainConfig& config, const QuadratureGrid& grid) {
    validate(start);
    if (!(config.schedule.base >= 0.0) || !(config.schedule.decay >= 0.0))
        throw std::invalid_argument("subgradient_descent: invalid step schedule");
    if (config.budget < 0) throw std::invalid_argument("subgradient_descent: negative budget");
    if (!instance.loss.dy) throw std::invalid_argument("subgradient_descent: loss has no dy");

    TrainRecord rec;
    NetworkConfig w = start;
    const auto diverging = [&]() {
        if (rec.steps.empty() ||
            rec.steps.back().norm_inf <= config.diverge_norm_threshold)
            return false;
        const int n = static_cast<int>(rec.steps.size());
        if (n < config.diverge_window) return false;
        for (int i = n - config.diverge_window + 1; i < n; ++i) {
            const double prev = rec.steps[i - 1].err;
            if (rec.steps[i].err > prev + 1e-12 * std::max(1.0, std::abs(prev))) return false;
        }
        return true;
    };

    for (int t = 0; t <= config.budget; ++t) {
        const double eta = config.schedule.at(t);
        rec.steps.push_back({t, eval_error(w, instance, grid), param_norm_inf(w), eta});
        if (config.snapshot_every > 0 && t % config.snapshot_every == 0)
            rec.snapshots.emplace_back(t, w);
        if (diverging()) {
            rec.verdict = Verdict::norm_diverging;
            break;
        }
        if (t == config.budget) {
            rec.verdict = Verdict::budget_exhausted;
            break;
        }
        const NetworkGradient g = err_gradient(instance, w, grid);
        if (!all_finite(g))
            throw std::runtime_error("subgradient_descent: non-finite gradient at iteration " +
                                     std::to_string(t));
        if (param_norm_inf(g) < config.converge_grad_tol) {
            rec.verdict = Verdict::converged;
            break;
        }
        axpy_params(-eta, g, w);
    }
    rec.final_config = std::move(w);
    return rec;
}

NetworkConfig pattern_search(const ProblemInstance& instance, NetworkConfig w,
                             const QuadratureGrid& grid, double step0, double step_min,
                             int max_sweeps_per_level) {
    validate(w);
    double err = eval_error(w, instance, grid);
    // Deterministic parameter order: skip and neuron columns, then output
    // weights, then biases.
    std::vector<double*> params;
    for (Vec& col : w.w1)
        for (double& v : col) params.push_back(&v);
    for (double& v : w.w2) params.push_back(&v);
    for (double& v : w.bias) params.push_back(&v);

    for (double step = step0; step >= step_min; step *= 0.5) {
        for (int sweep = 0; sweep < max_sweeps_per_level; ++sweep) {
            bool improved = false;
            for (double* p : params) {
                const double saved = *p;
                for (const double delta : {step, -step}) {
                    *p = saved + delta;
                    const double e = eval_error(w, instance, grid);
                    if (e < err) {
                        err = e;
                        improved = true;
                        break;
                    }
                    *p = saved;
                }
            }
            if (!improved) break;
        }
    }
    return w;
}

SearchResult multistart_min(const ProblemInstance& instance, std::size_t d_in, std::size_t width,
                            int restarts, const TrainConfig& config, const QuadratureGrid& grid) {
    if (restarts < 1) throw std::invalid_argument("multistart_min: restarts must be >= 1");
    const double init_scale = 1.0 / std::sqrt(static_cast<double>(d_in) + 1.0);

    SearchResult best;
    bool have_best = false;
    for (int r = 0; r < restarts; ++r) {
        std::uint64_t state = config.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r);
        std::mt19937_64 rng(splitmix64(state));
        std::uniform_real_distribution<double> uniform(-1.0, 1.0);

        NetworkConfig w0 = zero_network(d_in, width);
        for (Vec& col : w0.w1)
            for (double& v : col) v = init_scale * uniform(rng);
        for (double& v : w0.w2) v = init_scale * uniform(rng);
        for (double& v : w0.bias) v = init_scale * uniform(rng);

        const TrainRecord rec = subgradient_descent(instance, w0, config, grid);
        NetworkConfig w = pattern_search(instance, rec.final_config, grid);
        const double e = eval_error(w, instance, grid);
        if (!have_best || e < best.err) {
            best = {std::move(w), e};
            have_best = true;
        }
    }
    return best;
}

namespace {

// Minimizes the widened error in the added kink for a fixed (normal, offset):
// bracket by doubling around 0, then golden section. Falls back to kink 0
// (no change) so widening can never come out worse.
std::pair<double, double> best_kink(const std::function<double(double)>& widened_err,
                                    int max_evals) {
    int evals = 0;
    const auto f = [&](double t) {
        ++evals;
        return widened_err(t);
    };
    const double f0 = f(0.0);
    double lo = -1.0, hi = 1.0;
    bool bracketed = false;
    while (evals + 2 <= max_evals) {
        if (f0 <= std::min(f(lo), f(hi))) {
            bracketed = true;
            break;
        }
        lo *= 2.0;
        hi *= 2.0;
    }
    if (!bracketed) return {0.0, f0};

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (evals < max_evals && (b - a) > 1e-10 * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double t = 0.5 * (a + b);
    const double ft = widened_err(t);
    if (f0 <= ft) return {0.0, f0};
    return {t, ft};
}

std::vector<Vec> gain_directions(std::size_t d_in) {
    std::vector<Vec> dirs;
    if (d_in == 1) {
        dirs.push_back({1.0});
        dirs.push_back({-1.0});
    } else if (d_in == 2) {
        for (int k = 0; k < 64; ++k) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / 64.0;
            dirs.push_back({std::cos(theta), std::sin(theta)});
        }
    } else {
        std::mt19937_64 rng(42);
        std::normal_distribution<double> gauss(0.0, 1.0);
        while (dirs.size() < 64) {
            Vec v(d_in);
            for (double& c : v) c = gauss(rng);
            const double len = norm2(v);
            if (len > 1e-8) dirs.push_back((1.0 / len) * v);
        }
    }
    return dirs;
}

}  // namespace

NeuronGain neuron_gain(const ProblemInstance& instance, const NetworkConfig& w,
                       const QuadratureGrid& grid, int search_budget) {
    validate(w);
    const std::size_t d_in = w.d_in();
    const std::size_t n_nodes = grid.size();

    // Per-node response values and loss-derivative weights, reused across the
    // whole (normal, offset) grid.
    Vec base(n_nodes), resid(n_nodes), dens(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        dens[i] = instance.density(grid.nodes[i]);
        base[i] = eval_response(w, grid.nodes[i]);
        resid[i] = dens[i] == 0.0
                       ? 0.0
                       : grid.weights[i] * dens[i] * instance.loss.dy(grid.nodes[i], base[i]);
    }
    const double err0 = eval_error(w, instance, grid);

    NeuronGain out;
    out.best = EffectiveNeuron{Vec(d_in, 0.0), 0.0, 0.0};
    out.best.normal[0] = 1.0;
    double best_err = err0;

    Vec activ(n_nodes);
    for (const Vec& dir : gain_directions(d_in)) {
        double o_min = std::numeric_limits<double>::infinity();
        double o_max = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < (std::size_t{1} << d_in); ++c) {
            double v = 0.0;
            for (std::size_t i = 0; i < d_in; ++i)
                v += dir[i] * (((c >> i) & 1) ? instance.box.hi[i] : instance.box.lo[i]);
            o_min = std::min(o_min, v);
            o_max = std::max(o_max, v);
        }
        for (int j = 0; j < 33; ++j) {
            const double o =
                o_min + (static_cast<double>(j) + 0.5) / 33.0 * (o_max - o_min);
            double first_order = 0.0;
            for (std::size_t i = 0; i < n_nodes; ++i) {
                const double a = dot(dir, grid.nodes[i]) - o;
                activ[i] = a > 0.0 ? a : 0.0;
                first_order += resid[i] * activ[i];
            }
            out.first_order_max = std::max(out.first_order_max, std::abs(first_order));

            const auto widened_err = [&](double kink) {
                double s = 0.0;
                for (std::size_t i = 0; i < n_nodes; ++i) {
                    if (dens[i] == 0.0) continue;
                    s += grid.weights[i] * dens[i] *
                         instance.loss.value(grid.nodes[i], base[i] + kink * activ[i]);
                }
                return s;
            };
            const auto [kink, e] = best_kink(widened_err, search_budget);
            if (e < best_err) {
                best_err = e;
                out.best = EffectiveNeuron{dir, o, kink};
            }
        }
    }
    out.gain = std::max(0.0, err0 - best_err);
    return out;
}

}  // namespace relu_landscape
