#include "relu_landscape/responses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relu_landscape {

int GeneralizedResponse::declared_dimension() const {
    int d = 0;
    for (const ResponseTerm& t : terms) d += t.multiplicity;
    return d;
}

void validate(const GeneralizedResponse& r) {
    const std::size_t dim = r.d_in();
    if (dim == 0) throw std::invalid_argument("GeneralizedResponse: d_in must be positive");
    for (const ResponseTerm& t : r.terms) {
        validate(t.halfspace);
        if (t.halfspace.normal.size() != dim || t.delta.size() != dim)
            throw std::invalid_argument("GeneralizedResponse: dimension mismatch");
        if (t.multiplicity != 1 && t.multiplicity != 2)
            throw std::invalid_argument("GeneralizedResponse: multiplicity must be 1 or 2");
    }
    for (std::size_t i = 0; i < r.terms.size(); ++i)
        for (std::size_t j = i + 1; j < r.terms.size(); ++j)
            if (same_boundary(r.terms[i].halfspace, r.terms[j].halfspace))
                throw std::invalid_argument("GeneralizedResponse: two terms share a boundary");
}

double eval_genresponse(const GeneralizedResponse& r, const Vec& x) {
    double y = r.background(x);
    for (const ResponseTerm& t : r.terms)
        if (t.halfspace.contains(x)) y += dot(t.delta, x) + t.intercept;
    return y;
}

bool term_is_continuous(const ResponseTerm& term, double* kink, double tol) {
    const double c = dot(term.delta, term.halfspace.normal);
    if (kink) *kink = c;
    double cross = 0.0;
    for (std::size_t i = 0; i < term.delta.size(); ++i)
        cross = std::max(cross, std::abs(term.delta[i] - c * term.halfspace.normal[i]));
    if (cross > tol) return false;
    return std::abs(c * term.halfspace.offset + term.intercept) <= tol;
}

ResponseClass classify(const GeneralizedResponse& r) {
    bool all_continuous = true;
    for (const ResponseTerm& t : r.terms) {
        const bool cont = term_is_continuous(t);
        if (!cont && t.multiplicity == 1) return ResponseClass::invalid;
        all_continuous = all_continuous && cont;
    }
    return all_continuous ? ResponseClass::simple : ResponseClass::strict;
}

NetworkConfig to_network(const GeneralizedResponse& r) {
    if (classify(r) != ResponseClass::simple)
        throw std::invalid_argument("to_network: response is not simple");
    EffectiveTuple t;
    t.background = r.background;
    for (const ResponseTerm& term : r.terms) {
        double kink = 0.0;
        term_is_continuous(term, &kink);
        t.neurons.push_back({term.halfspace.normal, term.halfspace.offset, kink});
    }
    return tuple_to_network(t);
}

NetworkConfig approximate_term(const ResponseTerm& term, int n) {
    if (n < 1) throw std::invalid_argument("approximate_term: n must be >= 1");
    const std::size_t dim = term.halfspace.normal.size();
    NetworkConfig w = zero_network(dim, 2);
    for (std::size_t i = 0; i < dim; ++i) {
        w.w1[1][i] = term.delta[i] + n * term.halfspace.normal[i];
        w.w1[2][i] = -term.delta[i] + n * term.halfspace.normal[i];
    }
    w.bias[1] = term.intercept - n * term.halfspace.offset;
    w.bias[2] = -term.intercept - n * term.halfspace.offset;
    w.w2[0] = 0.5;
    w.w2[1] = -0.5;
    return w;
}

NetworkConfig approximate_response(const GeneralizedResponse& r, int n) {
    if (n < 1) throw std::invalid_argument("approximate_response: n must be >= 1");
    validate(r);
    NetworkConfig w;
    w.w1.push_back(r.background.linear);
    w.bias.push_back(r.background.constant);
    for (const ResponseTerm& term : r.terms) {
        double kink = 0.0;
        if (term_is_continuous(term, &kink)) {
            w.w1.push_back(term.halfspace.normal);
            w.bias.push_back(-term.halfspace.offset);
            w.w2.push_back(kink);
        } else {
            const NetworkConfig two = approximate_term(term, n);
            for (std::size_t j = 1; j <= 2; ++j) {
                w.w1.push_back(two.w1[j]);
                w.bias.push_back(two.bias[j]);
                w.w2.push_back(two.w2[j - 1]);
            }
        }
    }
    return w;
}

GeneralizedResponse transform(const GeneralizedResponse& r, const AffineMap& phi) {
    validate(r);
    if (phi.dim() != r.d_in()) throw std::invalid_argument("transform: dimension mismatch");
    if (std::abs(phi.matrix.determinant()) <= 1e-12)
        throw std::invalid_argument("transform: singular affine map");
    GeneralizedResponse out;
    out.background.linear = phi.matrix.apply_transposed(r.background.linear);
    out.background.constant = dot(r.background.linear, phi.shift) + r.background.constant;
    for (const ResponseTerm& t : r.terms) {
        ResponseTerm nt;
        nt.halfspace = transform_halfspace(t.halfspace, phi);
        nt.delta = phi.matrix.apply_transposed(t.delta);
        nt.intercept = t.intercept + dot(t.delta, phi.shift);
        nt.multiplicity = t.multiplicity;
        out.terms.push_back(std::move(nt));
    }
    return out;
}

GeneralizedResponse from_network(const NetworkConfig& w) {
    const EffectiveTuple tuple = effective_tuple(w);
    GeneralizedResponse r;
    r.background = tuple.background;
    std::vector<std::pair<HalfSpace, double>> groups;  // canonical breakline -> kink sum
    for (const EffectiveNeuron& neuron : tuple.neurons) {
        if (neuron.kink == 0.0) continue;
        Vec n = neuron.normal;
        double o = neuron.offset;
        // Canonical orientation: first nonzero normal component positive,
        // using kink*(t)^+ = kink*(-t)^+ + kink*t to fold the flip into the
        // affine background.
        bool flip = false;
        for (double v : n) {
            if (v > 1e-12) break;
            if (v < -1e-12) {
                flip = true;
                break;
            }
        }
        if (flip) {
            for (std::size_t i = 0; i < n.size(); ++i) {
                r.background.linear[i] += neuron.kink * n[i];
                n[i] = -n[i];
            }
            r.background.constant -= neuron.kink * o;
            o = -o;
        }
        bool merged = false;
        for (auto& [hs, kink] : groups) {
            if (norm_inf(hs.normal - n) <= 1e-12 && std::abs(hs.offset - o) <= 1e-12) {
                kink += neuron.kink;
                merged = true;
                break;
            }
        }
        if (!merged) groups.push_back({HalfSpace{n, o}, neuron.kink});
    }
    for (const auto& [hs, kink] : groups) {
        if (kink == 0.0) continue;
        ResponseTerm t;
        t.halfspace = hs;
        t.delta = kink * hs.normal;
        t.intercept = -kink * hs.offset;
        t.multiplicity = 1;
        r.terms.push_back(std::move(t));
    }
    validate(r);
    return r;
}

namespace {

void check_last_term_normalized(const ResponseTerm& t, NormalizationCase kind) {
    const std::size_t dim = t.halfspace.normal.size();
    const double scale = 1.0 + norm2(t.delta) + std::abs(t.intercept);
    const double tol = 1e-8 * scale;
    bool ok = std::abs(t.halfspace.normal[0] - 1.0) <= tol && std::abs(t.halfspace.offset) <= tol;
    for (std::size_t i = 1; i < dim; ++i) ok = ok && std::abs(t.halfspace.normal[i]) <= tol;
    if (kind == NormalizationCase::independent) {
        ok = ok && std::abs(t.delta[0]) <= tol && std::abs(t.intercept) <= tol;
        double perp = 0.0;
        for (std::size_t i = 1; i < dim; ++i) perp = std::max(perp, std::abs(t.delta[i]));
        ok = ok && perp > kContinuityTol;  // a vanishing jump needs no improvement
    } else {
        for (std::size_t i = 1; i < dim; ++i) ok = ok && std::abs(t.delta[i]) <= tol;
        ok = ok && std::abs(t.intercept) > kContinuityTol;
    }
    if (!ok)
        throw std::invalid_argument("improve_kappa: last term is not in the required normal form");
}

}  // namespace

NormalizedResponse normalize_term(const GeneralizedResponse& r, std::size_t k) {
    validate(r);
    if (k >= r.terms.size()) throw std::invalid_argument("normalize_term: index out of range");
    const ResponseTerm& term = r.terms[k];
    if (term_is_continuous(term))
        throw std::invalid_argument("normalize_term: term is continuous, nothing to normalize");

    const Vec& n = term.halfspace.normal;
    const double o = term.halfspace.offset;
    const Vec& delta = term.delta;
    const std::size_t dim = r.d_in();

    const double along = dot(delta, n);
    Vec perp = delta - along * n;
    const double perp_norm = norm2(perp);

    NormalizedResponse out;
    if (perp_norm <= 1e-9 * std::max(1.0, norm2(delta))) {
        // delta parallel to the normal; the jump sits in the intercept.
        out.kind = NormalizationCase::parallel;
        std::vector<Vec> cols;
        cols.push_back(n);
        for (Vec& tau : orthogonal_complement_basis(n)) cols.push_back(std::move(tau));
        const Mat b = Mat::from_columns(cols);
        Vec c(dim, 0.0);
        c[0] = o;
        out.phi = AffineMap{b, b.apply(c)};
    } else {
        out.kind = NormalizationCase::independent;
        // tau_1 is orthogonal to delta with tau_1.n = 1; the remaining columns
        // span the boundary directions.
        Vec u = (1.0 / norm2(delta)) * delta;
        Vec tau1 = n - dot(n, u) * u;
        tau1 = (1.0 / dot(tau1, n)) * tau1;
        std::vector<Vec> cols;
        cols.push_back(std::move(tau1));
        for (Vec& tau : orthogonal_complement_basis(n)) cols.push_back(std::move(tau));
        const Mat b = Mat::from_columns(cols);
        // c solves (B^T n).c = o (first coordinate) and (B^T delta).c = -intercept
        // (the rest, where B^T delta has zero first coordinate).
        const Vec bd = b.apply_transposed(delta);
        double tail = 0.0;
        for (std::size_t i = 1; i < dim; ++i) tail += bd[i] * bd[i];
        Vec c(dim, 0.0);
        c[0] = o;
        for (std::size_t i = 1; i < dim; ++i) c[i] = -term.intercept * bd[i] / tail;
        out.phi = AffineMap{b, b.apply(c)};
    }

    out.response = transform(r, out.phi);
    std::rotate(out.response.terms.begin() + static_cast<std::ptrdiff_t>(k),
                out.response.terms.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                out.response.terms.end());
    check_last_term_normalized(out.response.terms.back(), out.kind);
    return out;
}

GeneralizedResponse improve_kappa_independent(const GeneralizedResponse& r, double kappa) {
    validate(r);
    if (r.terms.empty()) throw std::invalid_argument("improve_kappa: no terms");
    if (!(kappa >= 1.0)) throw std::invalid_argument("improve_kappa: kappa must be >= 1");
    const ResponseTerm& last = r.terms.back();
    check_last_term_normalized(last, NormalizationCase::independent);

    GeneralizedResponse out;
    out.background = r.background;
    out.terms.assign(r.terms.begin(), r.terms.end() - 1);

    Vec plus = last.delta, minus = -1.0 * last.delta;
    plus[0] += kappa;
    minus[0] += kappa;
    // 1/2 (delta.x + kappa x_1)^+ : continuous by construction since the term
    // slope is parallel to the gate normal and vanishes on the boundary.
    out.terms.push_back({HalfSpace::from_unnormalized(plus, 0.0), 0.5 * plus, 0.0, 1});
    out.terms.push_back({HalfSpace::from_unnormalized(minus, 0.0), -0.5 * minus, 0.0, 1});
    validate(out);
    return out;
}

GeneralizedResponse improve_kappa_parallel(const GeneralizedResponse& r, double kappa) {
    validate(r);
    if (r.terms.empty()) throw std::invalid_argument("improve_kappa: no terms");
    if (!(kappa >= 1.0)) throw std::invalid_argument("improve_kappa: kappa must be >= 1");
    const ResponseTerm& last = r.terms.back();
    check_last_term_normalized(last, NormalizationCase::parallel);

    const std::size_t dim = r.d_in();
    const double alpha = last.delta[0];
    const double jump = last.intercept;
    GeneralizedResponse out;
    out.background = r.background;
    out.terms.assign(r.terms.begin(), r.terms.end() - 1);

    Vec e1(dim, 0.0);
    e1[0] = 1.0;
    const double cp = 0.5 * (alpha + jump * kappa);
    const double cm = 0.5 * (alpha - jump * kappa);
    out.terms.push_back({HalfSpace{e1, -1.0 / kappa}, cp * e1, cp / kappa, 1});
    out.terms.push_back({HalfSpace{e1, 1.0 / kappa}, cm * e1, -cm / kappa, 1});
    validate(out);
    return out;
}

}  // namespace relu_landscape
