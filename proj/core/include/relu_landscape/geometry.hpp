#pragma once

#include <cstdint>
#include <vector>

#include "relu_landscape/linalg.hpp"

namespace relu_landscape {

/// Open half-space {x : normal.x > offset} with unit normal. Membership is
/// strict; the boundary hyperplane {normal.x = offset} is excluded.
struct HalfSpace {
    Vec normal;
    double offset = 0.0;

    /// Normalizes {v.x > c} with arbitrary nonzero v into unit-normal form.
    static HalfSpace from_unnormalized(const Vec& v, double c);

    bool contains(const Vec& x) const { return signed_margin(x) > 0.0; }
    /// Euclidean distance to the boundary, signed positive inside.
    double signed_margin(const Vec& x) const { return dot(normal, x) - offset; }
};

/// Throws unless the normal is unit to within 1e-12.
void validate(const HalfSpace& h);

/// Whether two half-spaces share the same boundary hyperplane, i.e. their
/// (normal, offset) pairs agree up to a global sign, within tol.
bool same_boundary(const HalfSpace& a, const HalfSpace& b, double tol = 1e-10);

struct AffineMap {
    Mat matrix;
    Vec shift;

    Vec apply(const Vec& x) const;
    std::size_t dim() const { return shift.size(); }
};

AffineMap identity_map(std::size_t dim);
/// f after g: x -> f(g(x)).
AffineMap compose(const AffineMap& f, const AffineMap& g);
/// Throws std::invalid_argument when |det| <= 1e-12.
AffineMap invert(const AffineMap& f);

/// Preimage of h under phi: {x : phi(x) in h}, renormalized so the result
/// keeps a unit normal.
HalfSpace transform_halfspace(const HalfSpace& h, const AffineMap& phi);

struct Box {
    Vec lo;
    Vec hi;

    std::size_t dim() const { return lo.size(); }
    double volume() const;
    Vec center() const;
    bool contains(const Vec& x) const;
};

/// Throws unless hi > lo componentwise.
void validate(const Box& b);

/// One full-dimensional cell of a half-space arrangement: the set of points
/// strictly inside A_j for j in `included` and strictly outside the closure
/// of A_j otherwise.
struct CellIndex {
    std::vector<int> included;  // sorted 0-based term indices
    Vec witness;                // strictly interior point, margin > tol
};

/// Chebyshev-margin linear program: maximize r subject to
/// rows[i].x + r <= rhs[i] together with the box constraints
/// x_i + r <= hi_i and -x_i + r <= -lo_i. The optimal r is the radius of
/// the largest inscribed ball; r <= 0 means the region has empty interior.
struct MarginResult {
    double margin = 0.0;
    Vec point;
};
MarginResult max_margin_lp(const std::vector<Vec>& rows, const Vec& rhs, const Box& box);

/// Chebyshev feasibility of one sign vector: included[j] selects the side of
/// halfspaces[j] the cell lies on.
MarginResult cell_margin(const std::vector<HalfSpace>& halfspaces,
                         const std::vector<bool>& included, const Box& box);

struct CellEnumOptions {
    std::size_t samples = std::size_t{1} << 16;  // quasi-random screening points
    double margin_tol = 1e-9;                    // acceptance threshold for the LP margin
};

/// Enumerates every sign vector whose cell meets the interior of `box`.
/// Candidates are screened by quasi-random sampling and confirmed by the
/// Chebyshev LP; cells with optimal margin <= margin_tol are dropped.
/// Requires halfspaces.size() <= 20.
std::vector<CellIndex> enumerate_cells(const std::vector<HalfSpace>& halfspaces, const Box& box,
                                       const CellEnumOptions& options = {});

}  // namespace relu_landscape
