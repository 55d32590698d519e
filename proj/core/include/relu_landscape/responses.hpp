#pragma once

#include <cstddef>
#include <vector>

#include "relu_landscape/geometry.hpp"
#include "relu_landscape/networks.hpp"

namespace relu_landscape {

/// One half-space-gated affine term (delta.x + intercept) * 1l_A(x).
///
/// Multiplicity 1 claims the term is continuous, i.e. delta is parallel to
/// the half-space normal and the affine part vanishes on the boundary;
/// multiplicity 2 allows a jump across the boundary.
struct ResponseTerm {
    HalfSpace halfspace;
    Vec delta;
    double intercept = 0.0;
    int multiplicity = 2;
};

/// Affine background plus finitely many half-space terms. This class of
/// functions is closed under the limits that make plain network responses
/// degenerate, at the price of allowing discontinuities.
struct GeneralizedResponse {
    AffineFunc background;
    std::vector<ResponseTerm> terms;

    std::size_t d_in() const { return background.linear.size(); }
    /// Sum of the stored multiplicities (minimality is not computed).
    int declared_dimension() const;
};

/// Throws on dimension mismatch, multiplicity outside {1,2}, non-unit
/// normals, or two terms sharing a boundary hyperplane.
void validate(const GeneralizedResponse& r);

double eval_genresponse(const GeneralizedResponse& r, const Vec& x);

/// Tolerance for the algebraic continuity conditions on a term.
inline constexpr double kContinuityTol = 1e-10;

/// Whether (delta.x + intercept) * 1l_A vanishes on the boundary of A:
/// delta = c * normal (cross residual <= tol) and c * offset + intercept = 0.
/// `kink` receives c.
bool term_is_continuous(const ResponseTerm& term, double* kink = nullptr,
                        double tol = kContinuityTol);

enum class ResponseClass { simple, strict, invalid };

/// invalid: some multiplicity-1 term is actually discontinuous.
/// simple: every term passes the continuity test (all multiplicities may be
/// rewritten to 1). strict: valid but discontinuous.
ResponseClass classify(const GeneralizedResponse& r);

/// Exact network realization of a simple response; width = number of terms.
/// Throws unless classify(r) == simple.
NetworkConfig to_network(const GeneralizedResponse& r);

/// Two-ReLU network with response
///   1/2 ((delta + n*normal).x + intercept - n*offset)^+
/// - 1/2 ((-delta + n*normal).x - intercept - n*offset)^+ ,
/// which equals (delta.x + intercept) * 1l_A(x) at any fixed off-boundary x
/// once n exceeds |delta.x + intercept| / |normal.x - offset|. The term need
/// not satisfy the multiplicity-1 condition. Requires n >= 1.
NetworkConfig approximate_term(const ResponseTerm& term, int n);

/// Assembles a width-efficient approximant: terms that vanish on their
/// boundary become one exact neuron (so simple responses are reproduced
/// exactly for every n), jump terms become the two-neuron ramp above.
NetworkConfig approximate_response(const GeneralizedResponse& r, int n);

enum class NormalizationCase { independent, parallel };

struct NormalizedResponse {
    AffineMap phi;                 // response equals the input composed with phi
    GeneralizedResponse response;  // the selected term moved to the last position
    NormalizationCase kind = NormalizationCase::independent;
};

/// Right-composes r with an invertible affine map phi so that term k becomes
/// the last term with half-space {x_1 > 0} and either
///   independent case: delta.e_1 = 0 and intercept = 0, or
///   parallel case:    delta = alpha*e_1 and intercept != 0.
/// Requires term k to be discontinuous; the independent case additionally
/// needs d_in >= 2.
NormalizedResponse normalize_term(const GeneralizedResponse& r, std::size_t k);

/// Improvement family for a normalized independent-case last term: replaces
/// (delta.x) * 1l_{x_1>0} by
///   1/2 (delta.x + kappa*x_1)^+ - 1/2 (-delta.x + kappa*x_1)^+
/// written as two continuous half-space terms. Agrees with the input outside
/// the slab kappa*|x_1| < |delta.x| and interpolates linearly inside.
/// Requires kappa >= 1.
GeneralizedResponse improve_kappa_independent(const GeneralizedResponse& r, double kappa);

/// Improvement family for a normalized parallel-case last term: replaces
/// (alpha*x_1 + b) * 1l_{x_1>0} by
///   1/2 (alpha + b*kappa)(x_1 + 1/kappa)^+ + 1/2 (alpha - b*kappa)(x_1 - 1/kappa)^+ ,
/// which agrees with the input for |x_1| >= 1/kappa. Requires kappa >= 1.
GeneralizedResponse improve_kappa_parallel(const GeneralizedResponse& r, double kappa);

/// Right composition r(phi(.)) following the affine-invariance identities:
/// delta -> A^T delta, intercept -> intercept + delta.b, half-spaces by
/// preimage. Classification is preserved. Throws on singular phi.
GeneralizedResponse transform(const GeneralizedResponse& r, const AffineMap& phi);

/// Response of a network viewed as a (simple) generalized response.
GeneralizedResponse from_network(const NetworkConfig& w);

}  // namespace relu_landscape
