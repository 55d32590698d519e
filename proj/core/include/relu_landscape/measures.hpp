#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "relu_landscape/geometry.hpp"
#include "relu_landscape/networks.hpp"
#include "relu_landscape/responses.hpp"

namespace relu_landscape {

using ScalarField = std::function<double(const Vec&)>;

/// Loss L(x, y), convex in y. `dy` is the y-derivative away from kinks (the
/// built-in absolute loss uses sign(0) = 0). `minimizer_hint`, when set,
/// short-circuits the 1-d search in pointwise_minimizer.
struct LossSpec {
    std::function<double(const Vec&, double)> value;
    std::function<double(const Vec&, double)> dy;
    bool strictly_convex = false;
    ScalarField minimizer_hint;
};

/// Density on a compact box, loss, and optional target. The density formula
/// is clipped: it reads as 0 outside the box.
struct ProblemInstance {
    std::string label;
    Box box;
    ScalarField density_fn;
    LossSpec loss;
    ScalarField target;  // may be empty

    double density(const Vec& x) const { return box.contains(x) ? density_fn(x) : 0.0; }
};

/// Throws when the density is negative at a sampled point or the estimated
/// total mass is below 1e-12.
void validate(const ProblemInstance& instance, std::size_t samples = 4096);

enum class QuadratureScheme { tensor_midpoint, quasi_random };

struct QuadratureGrid {
    QuadratureScheme scheme = QuadratureScheme::tensor_midpoint;
    std::vector<Vec> nodes;
    Vec weights;

    std::size_t size() const { return nodes.size(); }
};

/// Midpoint rule on a uniform tensor grid. Nodes sit at cell centers, so a
/// breakline through a cell edge is never evaluated.
QuadratureGrid tensor_midpoint_grid(const Box& box, std::size_t points_per_axis);

/// Midpoint rule on an arbitrary per-axis partition (strictly increasing cell
/// edges from box.lo[i] to box.hi[i]).
QuadratureGrid tensor_midpoint_grid(const Box& box, const std::vector<Vec>& axis_edges);

/// Uniform cell edges refined geometrically toward `anchor` (adds cells of
/// width down to ~(hi-lo)/8/2^levels), for integrands with structure on a
/// scale far below the base resolution.
Vec graded_axis_edges(double lo, double hi, std::size_t base_cells, double anchor, int levels);

/// Low-discrepancy nodes with equal weights summing to the box volume.
QuadratureGrid quasi_random_grid(const Box& box, std::size_t count, std::uint64_t seed = 1);

/// 512 points for d_in = 1, 256 per axis for d_in = 2, 2^16 quasi-random
/// nodes for d_in >= 3.
QuadratureGrid default_grid(const Box& box);

/// Quadrature estimate of err(R) = integral of L(x, R(x)) h(x) dx.
/// Deterministic for a fixed grid (blocked pairwise reduction); throws on
/// non-finite loss values.
double eval_error(const ScalarField& response, const ProblemInstance& instance,
                  const QuadratureGrid& grid);
double eval_error(const NetworkConfig& w, const ProblemInstance& instance,
                  const QuadratureGrid& grid);
double eval_error(const GeneralizedResponse& r, const ProblemInstance& instance,
                  const QuadratureGrid& grid);

/// The pointwise minimizer m(x) of y -> L(x, y), to absolute tolerance 1e-8:
/// uses the closed-form hint when present, otherwise bracket expansion
/// followed by golden-section reduction. Throws when bracketing fails (loss
/// not coercive at x). For a loss that is convex but not strictly convex the
/// result is one minimizer among possibly many.
double pointwise_minimizer(const ProblemInstance& instance, const Vec& x);

/// Quadrature estimate of the integral of L(x, m(x)) h(x) dx, a lower bound
/// on eval_error of every response over the same grid.
double min_error_lower_bound(const ProblemInstance& instance, const QuadratureGrid& grid);

enum class HyperplaneStatus { pass, fail, skipped };

struct NicenessEntry {
    HyperplaneStatus status = HyperplaneStatus::skipped;
    double max_density = 0.0;  // largest h seen on the hyperplane inside the box
};

/// Heuristic diagnostic for the hyperplane hypothesis: for each candidate
/// boundary that separates density-positive samples (i.e. meets the interior
/// of the estimated convex hull of {h > 0}), samples the hyperplane inside
/// the box and reports max h. FAIL flags max h < 1e-9. Not a decision
/// procedure; thin density ridges below sampling resolution can be missed.
std::vector<NicenessEntry> niceness_diagnostic(const ProblemInstance& instance,
                                               const std::vector<HalfSpace>& boundaries,
                                               std::size_t samples = 1 << 14);

// Built-in densities, targets, and losses (ids match the instance JSON).
ScalarField density_uniform_box();
ScalarField density_three_disks_ex45();
ScalarField density_uniform_interval_ex48();
ScalarField target_tent();
ScalarField target_plateau_ex45();
ScalarField target_affine(Vec slope, double intercept);
ScalarField target_zero();
LossSpec loss_squared(ScalarField f);
LossSpec loss_pnorm(ScalarField f, double p);
LossSpec loss_abs(ScalarField f);

}  // namespace relu_landscape
