#include "relu_landscape/networks.hpp"

#include <cmath>
#include <stdexcept>

namespace relu_landscape {

void validate(const NetworkConfig& w) {
    if (w.w1.empty()) throw std::invalid_argument("NetworkConfig: missing skip column");
    const std::size_t d = w.w2.size();
    if (w.w1.size() != d + 1) throw std::invalid_argument("NetworkConfig: w1 needs d+1 columns");
    if (w.bias.size() != d + 1) throw std::invalid_argument("NetworkConfig: bias needs d+1 entries");
    for (const Vec& col : w.w1)
        if (col.size() != w.w1[0].size())
            throw std::invalid_argument("NetworkConfig: ragged w1 columns");
    if (w.w1[0].empty()) throw std::invalid_argument("NetworkConfig: d_in must be positive");
}

NetworkConfig zero_network(std::size_t d_in, std::size_t width) {
    NetworkConfig w;
    w.w1.assign(width + 1, Vec(d_in, 0.0));
    w.w2.assign(width, 0.0);
    w.bias.assign(width + 1, 0.0);
    return w;
}

double eval_response(const NetworkConfig& w, const Vec& x) {
    double y = dot(w.w1[0], x) + w.bias[0];
    for (std::size_t j = 1; j < w.w1.size(); ++j) {
        const double pre = dot(w.w1[j], x) + w.bias[j];
        if (pre > 0.0) y += w.w2[j - 1] * pre;
    }
    return y;
}

void validate(const EffectiveTuple& t) {
    const std::size_t d_in = t.background.linear.size();
    if (d_in == 0) throw std::invalid_argument("EffectiveTuple: d_in must be positive");
    for (const EffectiveNeuron& n : t.neurons) {
        if (n.normal.size() != d_in) throw std::invalid_argument("EffectiveTuple: dim mismatch");
        if (std::abs(norm2(n.normal) - 1.0) > 1e-12)
            throw std::invalid_argument("EffectiveTuple: neuron normal is not unit");
    }
}

EffectiveTuple effective_tuple(const NetworkConfig& w) {
    validate(w);
    EffectiveTuple t;
    t.background.linear = w.w1[0];
    t.background.constant = w.bias[0];
    for (std::size_t j = 1; j < w.w1.size(); ++j) {
        const double len = norm2(w.w1[j]);
        EffectiveNeuron n;
        if (len == 0.0) {
            // Degenerate neuron: constant contribution absorbed into the background.
            n.normal.assign(w.d_in(), 0.0);
            n.normal[0] = 1.0;
            n.offset = 0.0;
            n.kink = 0.0;
            t.background.constant += w.w2[j - 1] * std::max(w.bias[j], 0.0);
        } else {
            n.normal = (1.0 / len) * w.w1[j];
            n.offset = -w.bias[j] / len;
            n.kink = len * w.w2[j - 1];
        }
        t.neurons.push_back(std::move(n));
    }
    return t;
}

double eval_tuple(const EffectiveTuple& t, const Vec& x) {
    double y = t.background(x);
    for (const EffectiveNeuron& n : t.neurons) {
        const double pre = dot(n.normal, x) - n.offset;
        if (pre > 0.0) y += n.kink * pre;
    }
    return y;
}

NetworkConfig tuple_to_network(const EffectiveTuple& t) {
    validate(t);
    NetworkConfig w;
    w.w1.push_back(t.background.linear);
    w.bias.push_back(t.background.constant);
    for (const EffectiveNeuron& n : t.neurons) {
        w.w1.push_back(n.normal);
        w.bias.push_back(-n.offset);
        w.w2.push_back(n.kink);
    }
    return w;
}

void accumulate_response_subgradient(const NetworkConfig& w, const Vec& x, double scale,
                                     NetworkGradient& into) {
    for (std::size_t i = 0; i < x.size(); ++i) into.w1[0][i] += scale * x[i];
    into.bias[0] += scale;
    for (std::size_t j = 1; j < w.w1.size(); ++j) {
        const double pre = dot(w.w1[j], x) + w.bias[j];
        if (pre > 0.0) {
            into.w2[j - 1] += scale * pre;
            const double f = scale * w.w2[j - 1];
            for (std::size_t i = 0; i < x.size(); ++i) into.w1[j][i] += f * x[i];
            into.bias[j] += f;
        }
        // pre == 0: (t)^+ has derivative 0 here by convention, nothing to add.
    }
}

NetworkGradient response_subgradient(const NetworkConfig& w, const Vec& x) {
    validate(w);
    NetworkGradient g = zero_network(w.d_in(), w.width());
    accumulate_response_subgradient(w, x, 1.0, g);
    return g;
}

void scale_params(NetworkConfig& w, double s) {
    for (Vec& col : w.w1)
        for (double& v : col) v *= s;
    for (double& v : w.w2) v *= s;
    for (double& v : w.bias) v *= s;
}

void axpy_params(double a, const NetworkConfig& x, NetworkConfig& y) {
    for (std::size_t j = 0; j < x.w1.size(); ++j)
        for (std::size_t i = 0; i < x.w1[j].size(); ++i) y.w1[j][i] += a * x.w1[j][i];
    for (std::size_t j = 0; j < x.w2.size(); ++j) y.w2[j] += a * x.w2[j];
    for (std::size_t j = 0; j < x.bias.size(); ++j) y.bias[j] += a * x.bias[j];
}

double param_norm_inf(const NetworkConfig& w) {
    double m = 0.0;
    for (const Vec& col : w.w1) m = std::max(m, norm_inf(col));
    m = std::max(m, norm_inf(w.w2));
    m = std::max(m, norm_inf(w.bias));
    return m;
}

}  // namespace relu_landscape
