#pragma once

#include <cstddef>
#include <vector>

#include "bpnn/matrix.hpp"

namespace bpnn {

// Fully encoded, numeric dataset: one feature row and one target row per
// sample. ids carry the source CSV row numbers for reporting.
struct Dataset {
    Matrix features;  // n_samples x encoded_width
    Matrix targets;   // n_samples x target_width
    std::vector<std::size_t> ids;

    std::size_t size() const { return features.rows(); }
};

}  // namespace bpnn
