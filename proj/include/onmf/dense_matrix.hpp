#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace onmf {

// Column-major dense matrix of doubles. Holds the W factor and small dense
// inputs; deliberately not a general linear-algebra type.
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_)
            throw std::invalid_argument("DenseMatrix: values length != rows*cols");
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("DenseMatrix: non-finite entry");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return values_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[j * rows_ + i]; }

    std::span<double> col(std::size_t j) { return {values_.data() + j * rows_, rows_}; }
    std::span<const double> col(std::size_t j) const {
        return {values_.data() + j * rows_, rows_};
    }

    std::span<const double> values() const { return values_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> values_;
};

}  // namespace onmf
