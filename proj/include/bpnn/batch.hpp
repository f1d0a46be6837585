#pragma once

#include "bpnn/dataset.hpp"
#include "bpnn/network.hpp"
#include "bpnn/train.hpp"

namespace bpnn {

// Data-parallel kernels over sample rows. Each OpenMP kernel has a serial
// reference twin kept for testing; both use the same summation structure,
// so results are bit-identical to the reference for any thread count.
// tools/bench_kernels.cpp compares their throughput.

// One network output row per feature row.
Matrix batch_outputs(const Network& net, const Matrix& features);
Matrix batch_outputs_serial(const Network& net, const Matrix& features);

// Reported-loss form of the mean squared error of the network over a
// dataset: squared residuals averaged over samples x output width.
double dataset_mse(const Network& net, const Dataset& data);
double dataset_mse_serial(const Network& net, const Dataset& data);

// Per-sample loss gradients averaged over the whole dataset, accumulated in
// fixed-size blocks in sample order and reduced in block order. The block
// structure is independent of the thread count, which keeps the result
// deterministic.
Gradients batch_gradients(const Network& net, const Dataset& data);
Gradients batch_gradients_serial(const Network& net, const Dataset& data);

}  // namespace bpnn
