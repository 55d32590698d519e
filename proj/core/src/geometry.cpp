#include "relu_landscape/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "relu_landscape/quasirandom.hpp"

namespace relu_landscape {

HalfSpace HalfSpace::from_unnormalized(const Vec& v, double c) {
    const double len = norm2(v);
    if (len <= 1e-14) throw std::invalid_argument("HalfSpace: zero normal");
    return HalfSpace{(1.0 / len) * v, c / len};
}

void validate(const HalfSpace& h) {
    if (h.normal.empty()) throw std::invalid_argument("HalfSpace: empty normal");
    if (std::abs(norm2(h.normal) - 1.0) > 1e-12)
        throw std::invalid_argument("HalfSpace: normal is not unit");
}

bool same_boundary(const HalfSpace& a, const HalfSpace& b, double tol) {
    if (a.normal.size() != b.normal.size()) return false;
    double same = 0.0, flipped = 0.0;
    for (std::size_t i = 0; i < a.normal.size(); ++i) {
        same = std::max(same, std::abs(a.normal[i] - b.normal[i]));
        flipped = std::max(flipped, std::abs(a.normal[i] + b.normal[i]));
    }
    if (same <= tol && std::abs(a.offset - b.offset) <= tol) return true;
    if (flipped <= tol && std::abs(a.offset + b.offset) <= tol) return true;
    return false;
}

Vec AffineMap::apply(const Vec& x) const { return matrix.apply(x) + shift; }

AffineMap identity_map(std::size_t dim) { return AffineMap{Mat::identity(dim), Vec(dim, 0.0)}; }

AffineMap compose(const AffineMap& f, const AffineMap& g) {
    return AffineMap{f.matrix.multiply(g.matrix), f.matrix.apply(g.shift) + f.shift};
}

AffineMap invert(const AffineMap& f) {
    Mat inv = f.matrix.inverse();  // throws on |det| <= 1e-12
    return AffineMap{inv, -1.0 * inv.apply(f.shift)};
}

HalfSpace transform_halfspace(const HalfSpace& h, const AffineMap& phi) {
    // phi(x) in h  <=>  (A^T n).x > o - n.b
    Vec n = phi.matrix.apply_transposed(h.normal);
    return HalfSpace::from_unnormalized(n, h.offset - dot(h.normal, phi.shift));
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
}

Vec Box::center() const {
    Vec c(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
}

bool Box::contains(const Vec& x) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
}

void validate(const Box& b) {
    if (b.lo.empty() || b.lo.size() != b.hi.size())
        throw std::invalid_argument("Box: inconsistent bounds");
    for (std::size_t i = 0; i < b.lo.size(); ++i)
        if (!(b.hi[i] > b.lo[i])) throw std::invalid_argument("Box: degenerate axis");
}

namespace {

// Dense primal simplex for the margin LP. The substitution x = base + u,
// r = t - big with u, t >= 0 makes every right-hand side positive, so the
// slack basis is feasible and no phase-1 pass is needed. Bland's rule
// guarantees termination.
struct Simplex {
    std::size_t m, n;           // constraints, structural variables
    std::vector<Vec> tableau;   // m rows of n + m + 1 entries (slack block, rhs)
    std::vector<std::size_t> basis;

    Simplex(const std::vector<Vec>& g, const Vec& h) : m(h.size()), n(g[0].size()) {
        tableau.assign(m, Vec(n + m + 1, 0.0));
        basis.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) tableau[i][j] = g[i][j];
            tableau[i][n + i] = 1.0;
            tableau[i][n + m] = h[i];
            basis[i] = n + i;
        }
    }

    // Maximizes variable `objective_var`. Returns false if the iteration cap
    // is hit (numerical degeneracy).
    bool maximize(std::size_t objective_var, std::size_t max_iters = 20000) {
        Vec reduced(n + m, 0.0);
        reduced[objective_var] = 1.0;
        for (std::size_t iter = 0; iter < max_iters; ++iter) {
            std::size_t enter = n + m;
            for (std::size_t j = 0; j < n + m; ++j) {
                if (reduced[j] > 1e-11) {  // Bland: first improving column
                    enter = j;
                    break;
                }
            }
            if (enter == n + m) return true;  // optimal
            std::size_t leave = m;
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (tableau[i][enter] > 1e-11) {
                    const double ratio = tableau[i][n + m] / tableau[i][enter];
                    if (leave == m || ratio < best_ratio - 1e-14 ||
                        (std::abs(ratio - best_ratio) <= 1e-14 && basis[i] < basis[leave])) {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave == m) return false;  // unbounded: cannot happen for this LP
            pivot(leave, enter, reduced);
        }
        return false;
    }

    void pivot(std::size_t row, std::size_t col, Vec& reduced) {
        const double p = tableau[row][col];
        for (double& v : tableau[row]) v /= p;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = tableau[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n + m; ++j) tableau[i][j] -= f * tableau[row][j];
        }
        const double f = reduced[col];
        if (f != 0.0)
            for (std::size_t j = 0; j < n + m; ++j) reduced[j] -= f * tableau[row][j];
        basis[row] = col;
    }

    double value(std::size_t var) const {
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] == var) return tableau[i][n + m];
        return 0.0;
    }
};

}  // namespace

MarginResult max_margin_lp(const std::vector<Vec>& rows, const Vec& rhs, const Box& box) {
    validate(box);
    if (rows.size() != rhs.size()) throw std::invalid_argument("max_margin_lp: size mismatch");
    const std::size_t d = box.dim();

    std::vector<Vec> g;
    Vec h;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) throw std::invalid_argument("max_margin_lp: row dim mismatch");
        g.push_back(rows[i]);
        h.push_back(rhs[i]);
    }
    for (std::size_t i = 0; i < d; ++i) {
        Vec e(d, 0.0);
        e[i] = 1.0;
        g.push_back(e);
        h.push_back(box.hi[i]);
        e[i] = -1.0;
        g.push_back(e);
        h.push_back(-box.lo[i]);
    }

    // Shift to nonnegative variables: x = lo - pad + u, r = t - big.
    double span = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        span = std::max({span, std::abs(box.lo[i]), std::abs(box.hi[i])});
    const double pad = 1.0 + 2.0 * span;
    double big = 1.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double row_l1 = 0.0;
        for (double v : g[i]) row_l1 += std::abs(v);
        big = std::max(big, 1.0 + std::abs(h[i]) + row_l1 * (span + pad));
    }

    const std::size_t n = d + 1;
    std::vector<Vec> gs(g.size(), Vec(n, 0.0));
    Vec hs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        double dot_base = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            gs[i][j] = g[i][j];
            dot_base += g[i][j] * (box.lo[j] - pad);
        }
        gs[i][d] = 1.0;
        hs[i] = h[i] - dot_base + big;
        if (!(hs[i] > 0.0)) throw std::runtime_error("max_margin_lp: bad shift");
    }

    Simplex simplex(gs, hs);
    if (!simplex.maximize(d))
        throw std::runtime_error("max_margin_lp: simplex did not converge");

    MarginResult res;
    res.margin = simplex.value(d) - big;
    res.point.resize(d);
    for (std::size_t j = 0; j < d; ++j) res.point[j] = simplex.value(j) + box.lo[j] - pad;
    return res;
}

MarginResult cell_margin(const std::vector<HalfSpace>& halfspaces,
                         const std::vector<bool>& included, const Box& box) {
    std::vector<Vec> rows;
    Vec rhs;
    for (std::size_t j = 0; j < halfspaces.size(); ++j) {
        if (included[j]) {
            // n.x - o >= r  <=>  -n.x + r <= -o
            rows.push_back(-1.0 * halfspaces[j].normal);
            rhs.push_back(-halfspaces[j].offset);
        } else {
            rows.push_back(halfspaces[j].normal);
            rhs.push_back(halfspaces[j].offset);
        }
    }
    return max_margin_lp(rows, rhs, box);
}

std::vector<CellIndex> enumerate_cells(const std::vector<HalfSpace>& halfspaces, const Box& box,
                                       const CellEnumOptions& options) {
    validate(box);
    if (halfspaces.size() > 20)
        throw std::invalid_argument("enumerate_cells: more than 20 half-spaces");
    for (const HalfSpace& h : halfspaces) {
        validate(h);
        if (h.normal.size() != box.dim())
            throw std::invalid_argument("enumerate_cells: dimension mismatch");
    }
    const std::size_t k = halfspaces.size();
    const std::size_t d = box.dim();

    const auto sign_mask = [&](const Vec& x) {
        std::uint32_t mask = 0;
        for (std::size_t j = 0; j < k; ++j)
            if (halfspaces[j].contains(x)) mask |= (std::uint32_t{1} << j);
        return mask;
    };

    std::set<std::uint32_t> candidates;
    candidates.insert(sign_mask(box.center()));
    KroneckerSequence seq(d, 0x5eedULL);
    Vec x(d);
    for (std::size_t s = 0; s < options.samples; ++s) {
        const Vec u = seq.point(s);
        for (std::size_t i = 0; i < d; ++i) x[i] = box.lo[i] + u[i] * (box.hi[i] - box.lo[i]);
        candidates.insert(sign_mask(x));
    }

    std::vector<CellIndex> cells;
    std::vector<bool> included(k);
    for (std::uint32_t mask : candidates) {
        for (std::size_t j = 0; j < k; ++j) included[j] = (mask >> j) & 1;
        const MarginResult res = cell_margin(halfspaces, included, box);
        if (res.margin > options.margin_tol) {
            CellIndex cell;
            for (std::size_t j = 0; j < k; ++j)
                if (included[j]) cell.included.push_back(static_cast<int>(j));
            cell.witness = res.point;
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

}  // namespace relu_landscape
