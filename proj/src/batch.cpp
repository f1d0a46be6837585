#include "bpnn/batch.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

#include "bpnn/errors.hpp"

namespace bpnn {

namespace {

constexpr std::size_t kGradientBlock = 64;

void check_features(const Network& net, const Matrix& features) {
    if (features.cols() != net.input_dim) {
        throw DimensionMismatch("batch kernel: feature width " + std::to_string(features.cols()) +
                                " != input_dim " + std::to_string(net.input_dim));
    }
}

void check_dataset(const Network& net, const Dataset& data) {
    check_features(net, data.features);
    if (data.targets.cols() != net.output_dim()) {
        throw DimensionMismatch("batch kernel: target width " + std::to_string(data.targets.cols()) +
                                " != output width " + std::to_string(net.output_dim()));
    }
    if (data.targets.rows() != data.features.rows()) {
        throw DimensionMismatch("batch kernel: feature/target row count mismatch");
    }
}

void forward_rows(const Network& net, const Matrix& features, Matrix& out,
                  std::int64_t begin, std::int64_t end) {
    Vector row, scratch;
    for (std::int64_t r = begin; r < end; ++r) {
        network_output(net, features.row(static_cast<std::size_t>(r)), row, scratch);
        std::span<double> dst = out.row(static_cast<std::size_t>(r));
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = row[c];
    }
}

// Gradient sum over samples [begin, end), accumulated in sample order.
void accumulate_block(const Network& net, const Dataset& data, std::size_t begin,
                      std::size_t end, Gradients& partial) {
    for (std::size_t idx = begin; idx < end; ++idx) {
        const ForwardTrace trace = network_forward(net, data.features.row(idx));
        partial.add(backprop(net, trace, data.targets.row(idx)));
    }
}

Gradients reduce_blocks(const Network& net, const Dataset& data,
                        std::vector<Gradients>& partials) {
    Gradients total = Gradients::zeros_like(net);
    for (const Gradients& partial : partials) {
        total.add(partial);
    }
    total.scale(1.0 / static_cast<double>(data.size()));
    return total;
}

}  // namespace

Matrix batch_outputs_serial(const Network& net, const Matrix& features) {
    check_features(net, features);
    Matrix out(features.rows(), net.output_dim());
    forward_rows(net, features, out, 0, static_cast<std::int64_t>(features.rows()));
    return out;
}

Matrix batch_outputs(const Network& net, const Matrix& features) {
    check_features(net, features);
    Matrix out(features.rows(), net.output_dim());
    const std::int64_t n = static_cast<std::int64_t>(features.rows());
#pragma omp parallel
    {
        Vector row, scratch;
#pragma omp for schedule(static)
        for (std::int64_t r = 0; r < n; ++r) {
            network_output(net, features.row(static_cast<std::size_t>(r)), row, scratch);
            std::span<double> dst = out.row(static_cast<std::size_t>(r));
            for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = row[c];
        }
    }
    return out;
}

double dataset_mse_serial(const Network& net, const Dataset& data) {
    check_dataset(net, data);
    if (data.size() == 0) throw EmptyDataset("dataset_mse: empty dataset");
    return mse(data.targets, batch_outputs_serial(net, data.features));
}

double dataset_mse(const Network& net, const Dataset& data) {
    check_dataset(net, data);
    if (data.size() == 0) throw EmptyDataset("dataset_mse: empty dataset");
    return mse(data.targets, batch_outputs(net, data.features));
}

Gradients batch_gradients_serial(const Network& net, const Dataset& data) {
    check_dataset(net, data);
    if (data.size() == 0) throw EmptyDataset("batch_gradients: empty dataset");
    const std::size_t n = data.size();
    const std::size_t n_blocks = (n + kGradientBlock - 1) / kGradientBlock;
    std::vector<Gradients> partials(n_blocks, Gradients::zeros_like(net));
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::size_t begin = b * kGradientBlock;
        accumulate_block(net, data, begin, std::min(begin + kGradientBlock, n), partials[b]);
    }
    return reduce_blocks(net, data, partials);
}

Gradients batch_gradients(const Network& net, const Dataset& data) {
    check_dataset(net, data);
    if (data.size() == 0) throw EmptyDataset("batch_gradients: empty dataset");
    const std::size_t n = data.size();
    const std::size_t n_blocks = (n + kGradientBlock - 1) / kGradientBlock;
    std::vector<Gradients> partials(n_blocks, Gradients::zeros_like(net));
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kGradientBlock;
        accumulate_block(net, data, begin, std::min(begin + kGradientBlock, n),
                         partials[static_cast<std::size_t>(b)]);
    }
    return reduce_blocks(net, data, partials);
}

}  // namespace bpnn
