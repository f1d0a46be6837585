#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bpnn/errors.hpp"

namespace bpnn {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Sum by recursive halving. Splitting a sequence of 2n elements that repeats
// an n-element sequence twice yields exactly twice the n-element sum, so
// dataset-level means are invariant under duplication of the data.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() == 0) return 0.0;
    if (xs.size() == 1) return xs[0];
    if (xs.size() == 2) return xs[0] + xs[1];
    const std::size_t mid = xs.size() / 2;
    return pairwise_sum(xs.subspan(0, mid)) + pairwise_sum(xs.subspan(mid));
}

}  // namespace bpnn
