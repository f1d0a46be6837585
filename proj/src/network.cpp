#include "bpnn/network.hpp"

#include <cmath>
#include <string>

#include "bpnn/errors.hpp"
#include "bpnn/rng.hpp"

namespace bpnn {

double activate(Activation kind, double z) {
    switch (kind) {
        case Activation::Tanh: {
            // tanh(z) rounds to exactly +/-1 for |z| > ~19; clamp one ulp in
            // so the result stays strictly inside (-1, 1).
            static const double kOneBelow = std::nextafter(1.0, 0.0);
            const double t = std::tanh(z);
            if (t >= 1.0) return kOneBelow;
            if (t <= -1.0) return -kOneBelow;
            return t;
        }
        case Activation::Identity:
            return z;
    }
    return z;
}

double activate_derivative(Activation kind, double z) {
    switch (kind) {
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::Identity:
            return 1.0;
    }
    return 1.0;
}

void Network::validate() const {
    if (layers.size() < 2) {
        throw InvalidArchitecture("network needs at least one hidden layer (got " +
                                  std::to_string(layers.size()) + " layers)");
    }
    std::size_t width = input_dim;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        if (layer.fan_in() != width) {
            throw DimensionMismatch("layer " + std::to_string(l) + " expects input width " +
                                    std::to_string(layer.fan_in()) + ", got " + std::to_string(width));
        }
        if (layer.biases.size() != layer.fan_out()) {
            throw DimensionMismatch("layer " + std::to_string(l) + " bias length " +
                                    std::to_string(layer.biases.size()) + " != rows " +
                                    std::to_string(layer.fan_out()));
        }
        for (double w : layer.weights.data()) {
            if (!std::isfinite(w)) throw InvalidArchitecture("non-finite weight in layer " + std::to_string(l));
        }
        for (double b : layer.biases) {
            if (!std::isfinite(b)) throw InvalidArchitecture("non-finite bias in layer " + std::to_string(l));
        }
        width = layer.fan_out();
    }
}

void layer_forward(const Layer& layer, std::span<const double> input,
                   Vector& pre_activation, Vector& activation) {
    const std::size_t n_in = layer.fan_in();
    const std::size_t n_out = layer.fan_out();
    if (input.size() != n_in) {
        throw DimensionMismatch("layer_forward: input length " + std::to_string(input.size()) +
                                " != layer input width " + std::to_string(n_in));
    }
    pre_activation.resize(n_out);
    activation.resize(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
        double z = layer.biases[i];
        const std::span<const double> w = layer.weights.row(i);
        for (std::size_t j = 0; j < n_in; ++j) {
            z += w[j] * input[j];
        }
        pre_activation[i] = z;
        activation[i] = activate(layer.activation, z);
    }
}

ForwardTrace network_forward(const Network& net, std::span<const double> input) {
    if (input.size() != net.input_dim) {
        throw DimensionMismatch("network_forward: input length " + std::to_string(input.size()) +
                                " != input_dim " + std::to_string(net.input_dim));
    }
    ForwardTrace trace;
    trace.input.assign(input.begin(), input.end());
    trace.pre_activations.resize(net.layers.size());
    trace.activations.resize(net.layers.size());
    std::span<const double> current = trace.input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        layer_forward(net.layers[l], current, trace.pre_activations[l], trace.activations[l]);
        current = trace.activations[l];
    }
    return trace;
}

void network_output(const Network& net, std::span<const double> input,
                    Vector& out, Vector& scratch) {
    if (input.size() != net.input_dim) {
        throw DimensionMismatch("network_output: input length " + std::to_string(input.size()) +
                                " != input_dim " + std::to_string(net.input_dim));
    }
    // Ping-pong between `out` and `scratch`; pre-activation values are not
    // kept, the activation overwrites them in place.
    std::span<const double> current = input;
    Vector* dst = &out;
    Vector* other = &scratch;
    for (const Layer& layer : net.layers) {
        const std::size_t n_out = layer.fan_out();
        dst->resize(n_out);
        for (std::size_t i = 0; i < n_out; ++i) {
            double z = layer.biases[i];
            const std::span<const double> w = layer.weights.row(i);
            for (std::size_t j = 0; j < current.size(); ++j) {
                z += w[j] * current[j];
            }
            (*dst)[i] = activate(layer.activation, z);
        }
        current = *dst;
        std::swap(dst, other);
    }
    if (&out != other) out = *other;  // ensure the final activation lands in `out`
}

Vector network_output(const Network& net, std::span<const double> input) {
    Vector out, scratch;
    network_output(net, input, out, scratch);
    return out;
}

Network init_network(const std::vector<std::size_t>& layer_dims,
                     Activation hidden_activation, Activation output_activation,
                     std::uint64_t seed) {
    if (layer_dims.size() < 3) {
        throw InvalidArchitecture("need at least input, one hidden and output widths, got " +
                                  std::to_string(layer_dims.size()));
    }
    for (std::size_t d : layer_dims) {
        if (d == 0) throw InvalidArchitecture("layer width must be positive");
    }
    Network net;
    net.input_dim = layer_dims.front();
    std::mt19937_64 rng(seed);
    for (std::size_t l = 1; l < layer_dims.size(); ++l) {
        Layer layer;
        const std::size_t n_in = layer_dims[l - 1];
        const std::size_t n_out = layer_dims[l];
        const double bound = 1.0 / std::sqrt(static_cast<double>(n_in));
        layer.weights = Matrix(n_out, n_in);
        layer.biases.assign(n_out, 0.0);
        for (double& w : layer.weights.data()) {
            w = uniform_in(rng, -bound, bound);
        }
        layer.activation = (l + 1 == layer_dims.size()) ? output_activation : hidden_activation;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

}  // namespace bpnn
