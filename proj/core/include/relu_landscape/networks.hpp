#pragma once

#include <vector>

#include "relu_landscape/linalg.hpp"

namespace relu_landscape {

/// Affine function x -> linear.x + constant.
struct AffineFunc {
    Vec linear;
    double constant = 0.0;

    double operator()(const Vec& x) const { return dot(linear, x) + constant; }
};

/// Shallow residual ReLU network with d_in inputs and d hidden ReLU neurons.
///
/// w1 holds the d+1 weight columns; column 0 is the affine skip connection,
/// columns 1..d feed the hidden neurons. bias[0] is the skip bias, bias[j]
/// the j-th neuron's bias, and w2[j-1] its output weight. The response is
///   w1[0].x + bias[0] + sum_j w2[j-1] * (w1[j].x + bias[j])^+ .
struct NetworkConfig {
    std::vector<Vec> w1;
    Vec w2;
    Vec bias;

    std::size_t d_in() const { return w1.empty() ? 0 : w1[0].size(); }
    std::size_t width() const { return w2.size(); }
};

/// Throws on shape inconsistency (w1 needs width()+1 equally-sized columns,
/// bias needs width()+1 entries).
void validate(const NetworkConfig& w);

/// Zero network of the given shape (response identically 0).
NetworkConfig zero_network(std::size_t d_in, std::size_t width);

double eval_response(const NetworkConfig& w, const Vec& x);

/// One hidden neuron in geometric form: unit normal, offset of the breakline
/// {normal.x = offset}, and the kink (gradient jump size across it).
struct EffectiveNeuron {
    Vec normal;
    double offset = 0.0;
    double kink = 0.0;
};

/// Geometry-first equivalent of a network: per-neuron (normal, offset, kink)
/// plus the affine background. Evaluates to
///   background(x) + sum_j kink_j * (normal_j.x - offset_j)^+ .
struct EffectiveTuple {
    std::vector<EffectiveNeuron> neurons;
    AffineFunc background;

    std::size_t d_in() const { return background.linear.size(); }
};

void validate(const EffectiveTuple& t);

/// Non-degenerate neuron j maps to normal w1[j]/|w1[j]|, offset -bias[j]/|w1[j]|,
/// kink |w1[j]|*w2[j-1]. A degenerate neuron (w1[j] = 0) contributes its
/// constant w2[j-1]*(bias[j])^+ to the background and is emitted with kink 0,
/// normal e_1, offset 0.
EffectiveTuple effective_tuple(const NetworkConfig& w);

double eval_tuple(const EffectiveTuple& t, const Vec& x);

/// Inverse direction: neuron j gets w1[j] = normal_j, bias[j] = -offset_j,
/// w2[j-1] = kink_j; the background becomes the skip connection.
NetworkConfig tuple_to_network(const EffectiveTuple& t);

/// Parameter gradient of the response at x, stored with NetworkConfig shapes.
/// The derivative of t -> t^+ at t = 0 is taken to be 0, so neurons whose
/// pre-activation vanishes exactly contribute nothing.
using NetworkGradient = NetworkConfig;
NetworkGradient response_subgradient(const NetworkConfig& w, const Vec& x);

/// Adds scale * (gradient of the response at x) into `into`; shared by
/// response_subgradient and the training module's error gradient.
void accumulate_response_subgradient(const NetworkConfig& w, const Vec& x, double scale,
                                     NetworkGradient& into);

// Parameter-space helpers used by the training module.
void scale_params(NetworkConfig& w, double s);
void axpy_params(double a, const NetworkConfig& x, NetworkConfig& y);  // y += a*x
double param_norm_inf(const NetworkConfig& w);

}  // namespace relu_landscape
