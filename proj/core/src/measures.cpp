#include "relu_landscape/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <thread>

#include "relu_landscape/parallel.hpp"
#include "relu_landscape/quasirandom.hpp"

namespace relu_landscape {

unsigned worker_count() {
    if (const char* env = std::getenv("RELU_LANDSCAPE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
        return 1;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

double blocked_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
    constexpr std::size_t kBlock = 4096;
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    if (blocks == 0) return 0.0;
    Vec partial(blocks, 0.0);

    const auto run_block = [&](std::size_t b) {
        const std::size_t begin = b * kBlock;
        const std::size_t end = std::min(begin + kBlock, n);
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        partial[b] = s;
    };

    const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(blocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t b = w; b < blocks; b += workers) run_block(b);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (std::thread& t : pool) t.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    }

    // Pairwise tree over block sums: independent of the worker count.
    std::size_t len = blocks;
    while (len > 1) {
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < half; ++i) partial[i] = partial[2 * i] + partial[2 * i + 1];
        if (len % 2) partial[half] = partial[len - 1];
        len = half + (len % 2);
    }
    return partial[0];
}

void validate(const ProblemInstance& instance, std::size_t samples) {
    validate(instance.box);
    if (!instance.density_fn) throw std::invalid_argument("ProblemInstance: missing density");
    if (!instance.loss.value) throw std::invalid_argument("ProblemInstance: missing loss");
    const std::size_t d = instance.box.dim();
    KroneckerSequence seq(d, 7);
    double mass = 0.0;
    Vec x(d);
    for (std::size_t s = 0; s < samples; ++s) {
        const Vec u = seq.point(s);
        for (std::size_t i = 0; i < d; ++i)
            x[i] = instance.box.lo[i] + u[i] * (instance.box.hi[i] - instance.box.lo[i]);
        const double h = instance.density(x);
        if (h < 0.0) throw std::invalid_argument("ProblemInstance: negative density sample");
        mass += h;
    }
    mass *= instance.box.volume() / static_cast<double>(samples);
    if (!(mass > 1e-12)) throw std::invalid_argument("ProblemInstance: total mass is zero");
}

QuadratureGrid tensor_midpoint_grid(const Box& box, std::size_t points_per_axis) {
    validate(box);
    if (points_per_axis == 0) throw std::invalid_argument("tensor grid: zero resolution");
    std::vector<Vec> edges(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
        edges[i].resize(points_per_axis + 1);
        const double width = (box.hi[i] - box.lo[i]) / static_cast<double>(points_per_axis);
        for (std::size_t e = 0; e <= points_per_axis; ++e)
            edges[i][e] = box.lo[i] + static_cast<double>(e) * width;
        edges[i].back() = box.hi[i];
    }
    return tensor_midpoint_grid(box, edges);
}

QuadratureGrid tensor_midpoint_grid(const Box& box, const std::vector<Vec>& axis_edges) {
    validate(box);
    const std::size_t d = box.dim();
    if (axis_edges.size() != d) throw std::invalid_argument("tensor grid: edge list per axis");
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) {
        const Vec& e = axis_edges[i];
        if (e.size() < 2 || std::abs(e.front() - box.lo[i]) > 1e-12 ||
            std::abs(e.back() - box.hi[i]) > 1e-12)
            throw std::invalid_argument("tensor grid: edges must span the box axis");
        for (std::size_t j = 1; j < e.size(); ++j)
            if (!(e[j] > e[j - 1])) throw std::invalid_argument("tensor grid: edges not increasing");
        total *= e.size() - 1;
    }

    QuadratureGrid grid;
    grid.scheme = QuadratureScheme::tensor_midpoint;
    grid.nodes.reserve(total);
    grid.weights.reserve(total);
    std::vector<std::size_t> idx(d, 0);
    Vec node(d);
    for (std::size_t count = 0; count < total; ++count) {
        double w = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            const Vec& e = axis_edges[i];
            node[i] = 0.5 * (e[idx[i]] + e[idx[i] + 1]);
            w *= e[idx[i] + 1] - e[idx[i]];
        }
        grid.nodes.push_back(node);
        grid.weights.push_back(w);
        for (std::size_t i = 0; i < d; ++i) {
            if (++idx[i] < axis_edges[i].size() - 1) break;
            idx[i] = 0;
        }
    }
    return grid;
}

Vec graded_axis_edges(double lo, double hi, std::size_t base_cells, double anchor, int levels) {
    if (!(hi > lo) || base_cells == 0) throw std::invalid_argument("graded_axis_edges: bad axis");
    Vec edges;
    const double width = (hi - lo) / static_cast<double>(base_cells);
    for (std::size_t e = 0; e <= base_cells; ++e)
        edges.push_back(lo + static_cast<double>(e) * width);
    const double w0 = (hi - lo) / 8.0;
    for (int k = 0; k <= levels; ++k) {
        const double off = w0 * std::pow(0.5, k);
        for (const double v : {anchor - off, anchor + off})
            if (v > lo && v < hi) edges.push_back(v);
    }
    if (anchor > lo && anchor < hi) edges.push_back(anchor);
    std::sort(edges.begin(), edges.end());
    edges.front() = lo;
    edges.back() = hi;
    Vec out;
    for (double v : edges)
        if (out.empty() || v - out.back() > 1e-14 * std::max(1.0, std::abs(v))) out.push_back(v);
    out.back() = hi;
    return out;
}

QuadratureGrid quasi_random_grid(const Box& box, std::size_t count, std::uint64_t seed) {
    validate(box);
    if (count == 0) throw std::invalid_argument("quasi grid: zero nodes");
    QuadratureGrid grid;
    grid.scheme = QuadratureScheme::quasi_random;
    const std::size_t d = box.dim();
    KroneckerSequence seq(d, seed);
    const double w = box.volume() / static_cast<double>(count);
    Vec node(d);
    for (std::size_t s = 0; s < count; ++s) {
        const Vec u = seq.point(s);
        for (std::size_t i = 0; i < d; ++i) node[i] = box.lo[i] + u[i] * (box.hi[i] - box.lo[i]);
        grid.nodes.push_back(node);
        grid.weights.push_back(w);
    }
    return grid;
}

QuadratureGrid default_grid(const Box& box) {
    switch (box.dim()) {
        case 1:
            return tensor_midpoint_grid(box, 512);
        case 2:
            return tensor_midpoint_grid(box, 256);
        default:
            return quasi_random_grid(box, std::size_t{1} << 16);
    }
}

double eval_error(const ScalarField& response, const ProblemInstance& instance,
                  const QuadratureGrid& grid) {
    if (grid.size() == 0) throw std::invalid_argument("eval_error: empty grid");
    const double total = blocked_sum(grid.size(), [&](std::size_t i) {
        const Vec& x = grid.nodes[i];
        const double h = instance.density(x);
        if (h == 0.0) return 0.0;
        const double v = instance.loss.value(x, response(x)) * h * grid.weights[i];
        if (!std::isfinite(v)) throw std::runtime_error("eval_error: non-finite loss value");
        return v;
    });
    return total;
}

double eval_error(const NetworkConfig& w, const ProblemInstance& instance,
                  const QuadratureGrid& grid) {
    return eval_error([&](const Vec& x) { return eval_response(w, x); }, instance, grid);
}

double eval_error(const GeneralizedResponse& r, const ProblemInstance& instance,
                  const QuadratureGrid& grid) {
    return eval_error([&](const Vec& x) { return eval_genresponse(r, x); }, instance, grid);
}

double pointwise_minimizer(const ProblemInstance& instance, const Vec& x) {
    if (instance.loss.minimizer_hint) return instance.loss.minimizer_hint(x);
    const auto f = [&](double y) { return instance.loss.value(x, y); };

    double lo = -1.0, hi = 1.0;
    bool bracketed = false;
    for (int k = 0; k < 60; ++k) {
        if (f(0.5 * (lo + hi)) <= std::min(f(lo), f(hi))) {
            bracketed = true;
            break;
        }
        lo *= 2.0;
        hi *= 2.0;
    }
    if (!bracketed)
        throw std::runtime_error("pointwise_minimizer: bracketing failed (loss not coercive)");

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 300 && (b - a) > 1e-9; ++it) {
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
    return 0.5 * (a + b);
}

double min_error_lower_bound(const ProblemInstance& instance, const QuadratureGrid& grid) {
    if (grid.size() == 0) throw std::invalid_argument("min_error_lower_bound: empty grid");
    return blocked_sum(grid.size(), [&](std::size_t i) {
        const Vec& x = grid.nodes[i];
        const double h = instance.density(x);
        if (h == 0.0) return 0.0;
        const double m = pointwise_minimizer(instance, x);
        const double v = instance.loss.value(x, m) * h * grid.weights[i];
        if (!std::isfinite(v)) throw std::runtime_error("min_error_lower_bound: non-finite loss");
        return v;
    });
}

std::vector<NicenessEntry> niceness_diagnostic(const ProblemInstance& instance,
                                               const std::vector<HalfSpace>& boundaries,
                                               std::size_t samples) {
    const std::size_t d = instance.box.dim();
    KroneckerSequence seq(d, 11);
    std::vector<Vec> draws;
    std::vector<Vec> support;
    Vec x(d);
    for (std::size_t s = 0; s < samples; ++s) {
        const Vec u = seq.point(s);
        for (std::size_t i = 0; i < d; ++i)
            x[i] = instance.box.lo[i] + u[i] * (instance.box.hi[i] - instance.box.lo[i]);
        draws.push_back(x);
        if (instance.density(x) > 1e-12) support.push_back(x);
    }

    std::vector<NicenessEntry> report;
    for (const HalfSpace& h : boundaries) {
        validate(h);
        NicenessEntry entry;
        bool above = false, below = false;
        for (const Vec& p : support) {
            const double margin = h.signed_margin(p);
            above = above || margin > 1e-9;
            below = below || margin < -1e-9;
            if (above && below) break;
        }
        if (!(above && below)) {
            entry.status = HyperplaneStatus::skipped;
            report.push_back(entry);
            continue;
        }
        double max_h = 0.0;
        const auto probe = [&](const Vec& p) {
            Vec proj = p - h.signed_margin(p) * h.normal;
            if (instance.box.contains(proj)) max_h = std::max(max_h, instance.density(proj));
        };
        for (const Vec& p : draws) probe(p);
        for (const Vec& p : support) probe(p);
        entry.max_density = max_h;
        entry.status = max_h < 1e-9 ? HyperplaneStatus::fail : HyperplaneStatus::pass;
        report.push_back(entry);
    }
    return report;
}

ScalarField density_uniform_box() {
    return [](const Vec&) { return 1.0; };
}

ScalarField density_three_disks_ex45() {
    // Distance-to-center profile on each of the three open unit disks; zero
    // on the line x_2 = 0, which the disks only touch.
    return [](const Vec& x) {
        const auto disk = [&](double cx, double cy) {
            const double dx = x[0] - cx, dy = x[1] - cy;
            const double r = std::sqrt(dx * dx + dy * dy);
            return r < 1.0 ? r : 0.0;
        };
        return disk(0.0, 1.0) + disk(1.0, -1.0) + disk(-1.0, -1.0);
    };
}

ScalarField density_uniform_interval_ex48() {
    return [](const Vec&) { return 1.0; };
}

ScalarField target_tent() {
    return [](const Vec& x) {
        const double t = x[0];
        return std::max(t + 1.0, 0.0) - 2.0 * std::max(t, 0.0) + std::max(t - 1.0, 0.0);
    };
}

ScalarField target_plateau_ex45() {
    // 1 on the top disk, 0 on the two bottom disks, blended by relative
    // distance in between (the blend only matters where the density is zero).
    return [](const Vec& x) {
        const auto dist = [&](double cx, double cy) {
            const double dx = x[0] - cx, dy = x[1] - cy;
            return std::max(std::sqrt(dx * dx + dy * dy) - 1.0, 0.0);
        };
        const double d_top = dist(0.0, 1.0);
        const double d_bot = std::min(dist(1.0, -1.0), dist(-1.0, -1.0));
        return d_bot / (d_top + d_bot + 1e-300);
    };
}

ScalarField target_affine(Vec slope, double intercept) {
    return [slope = std::move(slope), intercept](const Vec& x) {
        return dot(slope, x) + intercept;
    };
}

ScalarField target_zero() {
    return [](const Vec&) { return 0.0; };
}

LossSpec loss_squared(ScalarField f) {
    LossSpec loss;
    loss.value = [f](const Vec& x, double y) {
        const double r = y - f(x);
        return r * r;
    };
    loss.dy = [f](const Vec& x, double y) { return 2.0 * (y - f(x)); };
    loss.strictly_convex = true;
    loss.minimizer_hint = f;
    return loss;
}

LossSpec loss_pnorm(ScalarField f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("loss_pnorm: p must be >= 1");
    LossSpec loss;
    loss.value = [f, p](const Vec& x, double y) { return std::pow(std::abs(y - f(x)), p); };
    loss.dy = [f, p](const Vec& x, double y) {
        const double r = y - f(x);
        if (r == 0.0) return 0.0;
        return p * std::pow(std::abs(r), p - 1.0) * (r > 0 ? 1.0 : -1.0);
    };
    loss.strictly_convex = p > 1.0;
    loss.minimizer_hint = f;
    return loss;
}

LossSpec loss_abs(ScalarField f) {
    LossSpec loss;
    loss.value = [f](const Vec& x, double y) { return std::abs(y - f(x)); };
    loss.dy = [f](const Vec& x, double y) {
        const double r = y - f(x);
        if (r > 0.0) return 1.0;
        if (r < 0.0) return -1.0;
        return 0.0;  // sign(0) = 0
    };
    loss.strictly_convex = false;
    loss.minimizer_hint = f;
    return loss;
}

}  // namespace relu_landscape
