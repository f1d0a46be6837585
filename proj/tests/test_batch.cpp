#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bpnn/batch.hpp"
#include "bpnn/errors.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bpnn;
using testutil::bits_equal;

namespace {

Dataset random_dataset(std::mt19937_64& rng, const Network& net, std::size_t n) {
    Dataset data;
    data.features = Matrix(n, net.input_dim);
    data.targets = Matrix(n, net.output_dim());
    for (double& v : data.features.data()) v = uniform_in(rng, -1.0, 1.0);
    for (double& v : data.targets.data()) v = uniform_in(rng, -1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) data.ids.push_back(i);
    return data;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const Network net = testutil::random_network(rng);
        const Dataset data = random_dataset(rng, net, 1 + uniform_below(rng, 150));

        CHECK(bits_equal(batch_outputs(net, data.features), batch_outputs_serial(net, data.features)));
        CHECK(bits_equal(dataset_mse(net, data), dataset_mse_serial(net, data)));
        CHECK(bits_equal(batch_gradients(net, data), batch_gradients_serial(net, data)));
    }
}

#ifdef _OPENMP
TEST_CASE("kernel results are invariant under the thread count") {
    std::mt19937_64 rng(72);
    const Network net = testutil::random_network(rng);
    const Dataset data = random_dataset(rng, net, 257);

    const int saved = omp_get_max_threads();
    const Matrix ref_outputs = batch_outputs_serial(net, data.features);
    const Gradients ref_grads = batch_gradients_serial(net, data);
    for (int threads : {1, 2, 3, 7}) {
        omp_set_num_threads(threads);
        CHECK(bits_equal(batch_outputs(net, data.features), ref_outputs));
        CHECK(bits_equal(batch_gradients(net, data), ref_grads));
    }
    omp_set_num_threads(saved);
}
#endif

TEST_CASE("batch_gradients equals the mean of per-sample backprop gradients") {
    std::mt19937_64 rng(73);
    const Network net = testutil::random_network(rng);
    const Dataset data = random_dataset(rng, net, 97);

    // Independent route: plain sequential accumulation, no blocking.
    Gradients expected = Gradients::zeros_like(net);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const ForwardTrace trace = network_forward(net, data.features.row(i));
        expected.add(backprop(net, trace, data.targets.row(i)));
    }
    expected.scale(1.0 / static_cast<double>(data.size()));

    const Gradients got = batch_gradients(net, data);
    for (std::size_t l = 0; l < got.weight_grads.size(); ++l) {
        for (std::size_t i = 0; i < got.weight_grads[l].data().size(); ++i) {
            CHECK(got.weight_grads[l].data()[i] ==
                  doctest::Approx(expected.weight_grads[l].data()[i]).epsilon(1e-12));
        }
        for (std::size_t i = 0; i < got.bias_grads[l].size(); ++i) {
            CHECK(got.bias_grads[l][i] ==
                  doctest::Approx(expected.bias_grads[l][i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("dataset_mse agrees with mse over batch outputs") {
    std::mt19937_64 rng(74);
    const Network net = testutil::random_network(rng);
    const Dataset data = random_dataset(rng, net, 33);
    CHECK(bits_equal(dataset_mse(net, data), mse(data.targets, batch_outputs(net, data.features))));
}

TEST_CASE("batch kernels reject shape mismatches and empty datasets") {
    const Network net = init_network({3, 4, 2}, Activation::Tanh, Activation::Tanh, 5);
    Dataset bad;
    bad.features = Matrix(4, 2);
    bad.targets = Matrix(4, 2);
    CHECK_THROWS_AS(batch_gradients(net, bad), DimensionMismatch);
    CHECK_THROWS_AS(batch_outputs(net, bad.features), DimensionMismatch);

    Dataset empty;
    empty.features = Matrix(0, 3);
    empty.targets = Matrix(0, 2);
    CHECK_THROWS_AS(dataset_mse(net, empty), EmptyDataset);
    CHECK_THROWS_AS(batch_gradients(net, empty), EmptyDataset);
}
