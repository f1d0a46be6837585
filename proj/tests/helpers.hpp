#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "bpnn/network.hpp"
#include "bpnn/rng.hpp"
#include "bpnn/train.hpp"

namespace testutil {

inline bool bits_equal(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

inline bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!bits_equal(a[i], b[i])) return false;
    }
    return true;
}

inline bool bits_equal(const bpnn::Matrix& a, const bpnn::Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && bits_equal(a.data(), b.data());
}

inline bool bits_equal(const bpnn::Network& a, const bpnn::Network& b) {
    if (a.input_dim != b.input_dim || a.layers.size() != b.layers.size()) return false;
    for (std::size_t l = 0; l < a.layers.size(); ++l) {
        if (a.layers[l].activation != b.layers[l].activation) return false;
        if (!bits_equal(a.layers[l].weights, b.layers[l].weights)) return false;
        if (!bits_equal(a.layers[l].biases, b.layers[l].biases)) return false;
    }
    return true;
}

inline bool bits_equal(const bpnn::Gradients& a, const bpnn::Gradients& b) {
    if (a.weight_grads.size() != b.weight_grads.size()) return false;
    for (std::size_t l = 0; l < a.weight_grads.size(); ++l) {
        if (!bits_equal(a.weight_grads[l], b.weight_grads[l])) return false;
        if (!bits_equal(a.bias_grads[l], b.bias_grads[l])) return false;
    }
    return true;
}

// Random architecture: 1-3 hidden layers, widths 2-8, tanh hidden, tanh or
// identity output.
inline bpnn::Network random_network(std::mt19937_64& rng) {
    const std::size_t n_hidden = 1 + bpnn::uniform_below(rng, 3);
    std::vector<std::size_t> dims;
    dims.push_back(2 + bpnn::uniform_below(rng, 7));
    for (std::size_t h = 0; h < n_hidden; ++h) {
        dims.push_back(2 + bpnn::uniform_below(rng, 7));
    }
    dims.push_back(2 + bpnn::uniform_below(rng, 7));
    const bpnn::Activation out_act =
        (rng() & 1) ? bpnn::Activation::Tanh : bpnn::Activation::Identity;
    return bpnn::init_network(dims, bpnn::Activation::Tanh, out_act, rng());
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n,
                                         double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = bpnn::uniform_in(rng, lo, hi);
    return v;
}

}  // namespace testutil
