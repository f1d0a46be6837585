#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bpnn/dataset.hpp"
#include "bpnn/network.hpp"

namespace bpnn {

// Per-layer partial derivatives, shape-congruent with the network they came
// from. weight_grads[l] mirrors layers[l].weights, bias_grads[l] the biases.
struct Gradients {
    std::vector<Matrix> weight_grads;
    std::vector<Vector> bias_grads;

    static Gradients zeros_like(const Network& net);
    void add(const Gradients& other);
    void scale(double factor);
};

enum class BatchMode { PerSample, FullBatch };

struct TrainConfig {
    double learning_rate = 0.1;
    std::size_t max_epochs = 100;
    BatchMode batch_mode = BatchMode::PerSample;
    std::uint64_t seed = 0;
    // Epochs without validation-loss improvement before halting; 0 disables.
    // Ignored when no validation set is supplied.
    std::size_t early_stop_patience = 0;
    bool shuffle = true;

    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_mse = 0.0;
    std::optional<double> val_mse;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

// Mean squared error over matching rows; the divisor is the total scalar
// count (rows x columns).
double mse(const Matrix& targets, const Matrix& predictions);

// The per-sample loss whose gradients backprop returns: half the squared
// error summed over output components. The half cancels the factor two of
// the square's derivative, so the output delta is plainly
// (prediction - target) * f'(z).
double sample_loss(const Network& net, std::span<const double> features,
                   std::span<const double> target);

// delta_k = (prediction_k - target_k) * f'(z_k) for the output layer.
Vector output_deltas(const ForwardTrace& trace, std::span<const double> target,
                     Activation output_activation);

// delta_j = (sum_k w_kj * delta_k) * f'(z_j): next layer's deltas pulled back
// through its weights, scaled by this layer's activation derivative.
Vector hidden_deltas(const Matrix& next_layer_weights, std::span<const double> deltas_next,
                     std::span<const double> pre_activations, Activation activation);

// Gradients of sample_loss at the trace's input/target. Weight gradient of
// layer l is the outer product of its deltas with the previous activation;
// bias gradient is the deltas themselves.
Gradients backprop(const Network& net, const ForwardTrace& trace,
                   std::span<const double> target);

// w <- w - learning_rate * g for every weight and bias, mutating `net` in
// place (the explicit mutable handle). Throws NonFiniteUpdate if any result
// is NaN/Inf. learning_rate == 0 is an exact fixed point, including for
// negative-zero parameters.
void apply_update(Network& net, const Gradients& grads, double learning_rate);

// Central finite differences of sample_loss over every parameter.
// step must lie in (0, 1e-2].
Gradients finite_difference_gradients(const Network& net, std::span<const double> features,
                                      std::span<const double> target, double step);

struct GradCheckReport {
    double max_rel_error = 0.0;
    bool passed = false;
    double tolerance = 0.0;
    // Location of the worst parameter.
    std::size_t worst_layer = 0;
    bool worst_is_bias = false;
    std::size_t worst_index = 0;
};

// Element-wise comparison with relative error
// |a - n| / max(|a|, |n|, 1e-12); passes iff the maximum is <= tolerance.
GradCheckReport compare_gradients(const Gradients& analytic, const Gradients& numeric,
                                  double tolerance);

GradCheckReport gradient_check(const Network& net, std::span<const double> features,
                               std::span<const double> target, double step, double tolerance);

// Gradient-descent training. PerSample applies an update after every sample
// (seeded deterministic shuffle per epoch when enabled); FullBatch applies
// one update per epoch from the gradient averaged over all samples in
// dataset order. History records the post-epoch MSE over the full training
// split (and validation split when given). Bit-reproducible for fixed
// inputs and config.
std::pair<Network, TrainHistory> train(Network net, const Dataset& train_set,
                                       const Dataset* val_set, const TrainConfig& config);

}  // namespace bpnn
