#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bpnn/matrix.hpp"

namespace bpnn {

enum class Activation { Tanh, Identity };

double activate(Activation kind, double z);

// Tanh -> 1 - tanh(z)^2, Identity -> 1.
double activate_derivative(Activation kind, double z);

// One fully connected layer: weights is (n_out x n_in), biases has n_out
// entries, the activation applies element-wise.
struct Layer {
    Matrix weights;
    Vector biases;
    Activation activation = Activation::Tanh;

    std::size_t fan_in() const { return weights.cols(); }
    std::size_t fan_out() const { return weights.rows(); }
};

// A feedforward network as an ordered chain of layers. Construction through
// init_network (and model loading) guarantees at least one hidden layer;
// the math operations below only require a shape-consistent chain, so tests
// can build degenerate single-layer instances directly.
struct Network {
    std::size_t input_dim = 0;
    std::vector<Layer> layers;

    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().fan_out(); }

    // Checks the shape chain, layer count >= 2 and finiteness of all
    // parameters. Throws InvalidArchitecture / DimensionMismatch.
    void validate() const;
};

// Per-layer intermediate values retained for backpropagation. Entry k of
// activations is f(pre_activations[k]) for layer k's activation; the final
// entry is the prediction.
struct ForwardTrace {
    Vector input;
    std::vector<Vector> pre_activations;
    std::vector<Vector> activations;

    const Vector& output() const { return activations.back(); }
};

// pre = weights * input + biases, act = f(pre). Output vectors are resized.
void layer_forward(const Layer& layer, std::span<const double> input,
                   Vector& pre_activation, Vector& activation);

ForwardTrace network_forward(const Network& net, std::span<const double> input);

// Forward pass that keeps no trace; writes the final activation into `out`.
// `scratch` carries the intermediate activations between layers so batch
// loops can reuse the allocation.
void network_output(const Network& net, std::span<const double> input,
                    Vector& out, Vector& scratch);
Vector network_output(const Network& net, std::span<const double> input);

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
// layer_dims lists every width including input and output, so it needs at
// least three entries. Same seed, same parameters, bit for bit.
Network init_network(const std::vector<std::size_t>& layer_dims,
                     Activation hidden_activation, Activation output_activation,
                     std::uint64_t seed);

}  // namespace bpnn
