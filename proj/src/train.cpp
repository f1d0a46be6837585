#include "bpnn/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bpnn/batch.hpp"
#include "bpnn/errors.hpp"
#include "bpnn/rng.hpp"

namespace bpnn {

Gradients Gradients::zeros_like(const Network& net) {
    Gradients g;
    g.weight_grads.reserve(net.layers.size());
    g.bias_grads.reserve(net.layers.size());
    for (const Layer& layer : net.layers) {
        g.weight_grads.emplace_back(layer.fan_out(), layer.fan_in());
        g.bias_grads.emplace_back(layer.fan_out(), 0.0);
    }
    return g;
}

void Gradients::add(const Gradients& other) {
    if (other.weight_grads.size() != weight_grads.size()) {
        throw DimensionMismatch("Gradients::add: layer count mismatch");
    }
    for (std::size_t l = 0; l < weight_grads.size(); ++l) {
        if (other.weight_grads[l].rows() != weight_grads[l].rows() ||
            other.weight_grads[l].cols() != weight_grads[l].cols()) {
            throw DimensionMismatch("Gradients::add: shape mismatch at layer " + std::to_string(l));
        }
        for (std::size_t i = 0; i < weight_grads[l].data().size(); ++i) {
            weight_grads[l].data()[i] += other.weight_grads[l].data()[i];
        }
        for (std::size_t i = 0; i < bias_grads[l].size(); ++i) {
            bias_grads[l][i] += other.bias_grads[l][i];
        }
    }
}

void Gradients::scale(double factor) {
    for (Matrix& m : weight_grads) {
        for (double& v : m.data()) v *= factor;
    }
    for (Vector& b : bias_grads) {
        for (double& v : b) v *= factor;
    }
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be finite and >= 0");
    }
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
}

double mse(const Matrix& targets, const Matrix& predictions) {
    if (targets.rows() != predictions.rows() || targets.cols() != predictions.cols()) {
        throw DimensionMismatch("mse: targets " + std::to_string(targets.rows()) + "x" +
                                std::to_string(targets.cols()) + " vs predictions " +
                                std::to_string(predictions.rows()) + "x" +
                                std::to_string(predictions.cols()));
    }
    if (targets.rows() == 0) throw EmptyInput("mse: no samples");
    std::vector<double> sq(targets.data().size());
    for (std::size_t i = 0; i < sq.size(); ++i) {
        const double d = targets.data()[i] - predictions.data()[i];
        sq[i] = d * d;
    }
    return pairwise_sum(sq) / static_cast<double>(sq.size());
}

double sample_loss(const Network& net, std::span<const double> features,
                   std::span<const double> target) {
    Vector out, scratch;
    network_output(net, features, out, scratch);
    if (target.size() != out.size()) {
        throw DimensionMismatch("sample_loss: target length " + std::to_string(target.size()) +
                                " != output width " + std::to_string(out.size()));
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = out[i] - target[i];
        loss += 0.5 * d * d;
    }
    return loss;
}

Vector output_deltas(const ForwardTrace& trace, std::span<const double> target,
                     Activation output_activation) {
    const Vector& prediction = trace.activations.back();
    const Vector& pre = trace.pre_activations.back();
    if (target.size() != prediction.size()) {
        throw DimensionMismatch("output_deltas: target length " + std::to_string(target.size()) +
                                " != output width " + std::to_string(prediction.size()));
    }
    Vector deltas(prediction.size());
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        deltas[k] = (prediction[k] - target[k]) * activate_derivative(output_activation, pre[k]);
    }
    return deltas;
}

Vector hidden_deltas(const Matrix& next_layer_weights, std::span<const double> deltas_next,
                     std::span<const double> pre_activations, Activation activation) {
    if (deltas_next.size() != next_layer_weights.rows()) {
        throw DimensionMismatch("hidden_deltas: deltas length " + std::to_string(deltas_next.size()) +
                                " != next layer rows " + std::to_string(next_layer_weights.rows()));
    }
    if (pre_activations.size() != next_layer_weights.cols()) {
        throw DimensionMismatch("hidden_deltas: pre-activation length " +
                                std::to_string(pre_activations.size()) + " != next layer cols " +
                                std::to_string(next_layer_weights.cols()));
    }
    Vector deltas(pre_activations.size());
    for (std::size_t j = 0; j < deltas.size(); ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < deltas_next.size(); ++k) {
            sum += next_layer_weights(k, j) * deltas_next[k];
        }
        deltas[j] = sum * activate_derivative(activation, pre_activations[j]);
    }
    return deltas;
}

namespace {

void check_trace(const Network& net, const ForwardTrace& trace) {
    if (trace.pre_activations.size() != net.layers.size() ||
        trace.activations.size() != net.layers.size() ||
        trace.input.size() != net.input_dim) {
        throw StaleTrace("trace does not match network layout");
    }
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (trace.activations[l].size() != net.layers[l].fan_out() ||
            trace.pre_activations[l].size() != net.layers[l].fan_out()) {
            throw StaleTrace("trace width mismatch at layer " + std::to_string(l));
        }
    }
}

}  // namespace

Gradients backprop(const Network& net, const ForwardTrace& trace,
                   std::span<const double> target) {
    check_trace(net, trace);
    Gradients grads = Gradients::zeros_like(net);
    Vector deltas = output_deltas(trace, target, net.layers.back().activation);
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const std::span<const double> prev_activation =
            (l == 0) ? std::span<const double>(trace.input) : std::span<const double>(trace.activations[l - 1]);
        Matrix& wg = grads.weight_grads[l];
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            for (std::size_t j = 0; j < prev_activation.size(); ++j) {
                wg(i, j) = deltas[i] * prev_activation[j];
            }
        }
        grads.bias_grads[l] = deltas;
        if (l > 0) {
            deltas = hidden_deltas(net.layers[l].weights, deltas, trace.pre_activations[l - 1],
                                   net.layers[l - 1].activation);
        }
    }
    return grads;
}

void apply_update(Network& net, const Gradients& grads, double learning_rate) {
    if (grads.weight_grads.size() != net.layers.size()) {
        throw DimensionMismatch("apply_update: gradient layer count mismatch");
    }
    if (learning_rate == 0.0) return;  // exact fixed point, keeps -0.0 params intact
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Layer& layer = net.layers[l];
        const Matrix& wg = grads.weight_grads[l];
        const Vector& bg = grads.bias_grads[l];
        if (wg.rows() != layer.fan_out() || wg.cols() != layer.fan_in() ||
            bg.size() != layer.biases.size()) {
            throw DimensionMismatch("apply_update: gradient shape mismatch at layer " +
                                    std::to_string(l));
        }
        for (std::size_t i = 0; i < layer.weights.data().size(); ++i) {
            double& w = layer.weights.data()[i];
            w -= learning_rate * wg.data()[i];
            if (!std::isfinite(w)) {
                throw NonFiniteUpdate("non-finite weight after update in layer " + std::to_string(l));
            }
        }
        for (std::size_t i = 0; i < layer.biases.size(); ++i) {
            double& b = layer.biases[i];
            b -= learning_rate * bg[i];
            if (!std::isfinite(b)) {
                throw NonFiniteUpdate("non-finite bias after update in layer " + std::to_string(l));
            }
        }
    }
}

Gradients finite_difference_gradients(const Network& net, std::span<const double> features,
                                      std::span<const double> target, double step) {
    if (!(step > 0.0) || step > 1e-2) {
        throw Error("finite_difference_gradients: step must be in (0, 1e-2]");
    }
    Network probe = net;
    Gradients grads = Gradients::zeros_like(net);
    const auto central = [&](double& param) {
        const double saved = param;
        param = saved + step;
        const double plus = sample_loss(probe, features, target);
        param = saved - step;
        const double minus = sample_loss(probe, features, target);
        param = saved;
        return (plus - minus) / (2.0 * step);
    };
    for (std::size_t l = 0; l < probe.layers.size(); ++l) {
        Layer& layer = probe.layers[l];
        for (std::size_t i = 0; i < layer.weights.data().size(); ++i) {
            grads.weight_grads[l].data()[i] = central(layer.weights.data()[i]);
        }
        for (std::size_t i = 0; i < layer.biases.size(); ++i) {
            grads.bias_grads[l][i] = central(layer.biases[i]);
        }
    }
    return grads;
}

GradCheckReport compare_gradients(const Gradients& analytic, const Gradients& numeric,
                                  double tolerance) {
    if (analytic.weight_grads.size() != numeric.weight_grads.size()) {
        throw DimensionMismatch("compare_gradients: layer count mismatch");
    }
    GradCheckReport report;
    report.tolerance = tolerance;
    const auto consider = [&](double a, double n, std::size_t layer, bool is_bias, std::size_t idx) {
        const double scale = std::max({std::fabs(a), std::fabs(n), 1e-12});
        const double rel = std::fabs(a - n) / scale;
        if (rel > report.max_rel_error) {
            report.max_rel_error = rel;
            report.worst_layer = layer;
            report.worst_is_bias = is_bias;
            report.worst_index = idx;
        }
    };
    for (std::size_t l = 0; l < analytic.weight_grads.size(); ++l) {
        const Matrix& aw = analytic.weight_grads[l];
        const Matrix& nw = numeric.weight_grads[l];
        if (aw.rows() != nw.rows() || aw.cols() != nw.cols() ||
            analytic.bias_grads[l].size() != numeric.bias_grads[l].size()) {
            throw DimensionMismatch("compare_gradients: shape mismatch at layer " + std::to_string(l));
        }
        for (std::size_t i = 0; i < aw.data().size(); ++i) {
            consider(aw.data()[i], nw.data()[i], l, false, i);
        }
        for (std::size_t i = 0; i < analytic.bias_grads[l].size(); ++i) {
            consider(analytic.bias_grads[l][i], numeric.bias_grads[l][i], l, true, i);
        }
    }
    report.passed = report.max_rel_error <= tolerance;
    return report;
}

GradCheckReport gradient_check(const Network& net, std::span<const double> features,
                               std::span<const double> target, double step, double tolerance) {
    const ForwardTrace trace = network_forward(net, features);
    const Gradients analytic = backprop(net, trace, target);
    const Gradients numeric = finite_difference_gradients(net, features, target, step);
    return compare_gradients(analytic, numeric, tolerance);
}

std::pair<Network, TrainHistory> train(Network net, const Dataset& train_set,
                                       const Dataset* val_set, const TrainConfig& config) {
    config.validate();
    net.validate();
    if (train_set.size() == 0) throw EmptyDataset("train: empty training set");
    if (train_set.features.cols() != net.input_dim) {
        throw DimensionMismatch("train: feature width " + std::to_string(train_set.features.cols()) +
                                " != input_dim " + std::to_string(net.input_dim));
    }
    if (train_set.targets.cols() != net.output_dim()) {
        throw DimensionMismatch("train: target width " + std::to_string(train_set.targets.cols()) +
                                " != output width " + std::to_string(net.output_dim()));
    }
    if (val_set && (val_set->features.cols() != net.input_dim ||
                    val_set->targets.cols() != net.output_dim())) {
        throw DimensionMismatch("train: validation set width mismatch");
    }

    TrainHistory history;
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t epochs_since_best = 0;

    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        try {
            if (config.batch_mode == BatchMode::PerSample) {
                if (config.shuffle) shuffle_inplace(order, rng);
                for (std::size_t idx : order) {
                    const ForwardTrace trace = network_forward(net, train_set.features.row(idx));
                    const Gradients grads = backprop(net, trace, train_set.targets.row(idx));
                    apply_update(net, grads, config.learning_rate);
                }
            } else {
                const Gradients grads = batch_gradients(net, train_set);
                apply_update(net, grads, config.learning_rate);
            }
        } catch (const NonFiniteUpdate& e) {
            throw NonFiniteUpdate("epoch " + std::to_string(epoch) + ": " + e.what());
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_mse = dataset_mse(net, train_set);
        if (val_set) record.val_mse = dataset_mse(net, *val_set);
        history.epochs.push_back(record);

        if (config.early_stop_patience > 0 && val_set) {
            if (*record.val_mse < best_val) {
                best_val = *record.val_mse;
                epochs_since_best = 0;
            } else if (++epochs_since_best >= config.early_stop_patience) {
                break;
            }
        }
    }
    return {std::move(net), std::move(history)};
}

}  // namespace bpnn
