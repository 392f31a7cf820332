#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace onmf {

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

// Compressed sparse-column matrix with O(nnz) column iteration. Immutable
// after construction, so it can be shared read-only across threads.
class SparseMatrix {
public:
    SparseMatrix() = default;

    SparseMatrix(std::size_t rows, std::size_t cols,
                 std::vector<std::size_t> col_ptr,
                 std::vector<std::size_t> row_idx,
                 std::vector<double> values)
        : rows_(rows), cols_(cols),
          col_ptr_(std::move(col_ptr)),
          row_idx_(std::move(row_idx)),
          values_(std::move(values)) {
        if (col_ptr_.size() != cols_ + 1)
            throw std::invalid_argument("SparseMatrix: column pointer length != cols+1");
        if (col_ptr_.front() != 0 || col_ptr_.back() != row_idx_.size() ||
            row_idx_.size() != values_.size())
            throw std::invalid_argument("SparseMatrix: inconsistent entry count");
        for (std::size_t j = 0; j < cols_; ++j) {
            if (col_ptr_[j] > col_ptr_[j + 1])
                throw std::invalid_argument("SparseMatrix: column pointers decrease");
            for (std::size_t t = col_ptr_[j]; t < col_ptr_[j + 1]; ++t) {
                if (row_idx_[t] >= rows_)
                    throw std::invalid_argument("SparseMatrix: row index out of range");
                if (t > col_ptr_[j] && row_idx_[t] <= row_idx_[t - 1])
                    throw std::invalid_argument(
                        "SparseMatrix: row indices not strictly increasing within column");
                if (!std::isfinite(values_[t]))
                    throw std::invalid_argument("SparseMatrix: non-finite value");
            }
        }
    }

    // Builds from unordered (row, col, value) triples; duplicates are summed.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> entries) {
        for (const Triplet& e : entries)
            if (e.row >= rows || e.col >= cols)
                throw std::invalid_argument("SparseMatrix: triplet index out of range");
        std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return a.col != b.col ? a.col < b.col : a.row < b.row;
        });
        std::vector<std::size_t> ptr(cols + 1, 0);
        std::vector<std::size_t> rix;
        std::vector<double> vals;
        rix.reserve(entries.size());
        vals.reserve(entries.size());
        for (std::size_t t = 0; t < entries.size();) {
            std::size_t u = t;
            double sum = 0.0;
            while (u < entries.size() && entries[u].row == entries[t].row &&
                   entries[u].col == entries[t].col)
                sum += entries[u++].value;
            rix.push_back(entries[t].row);
            vals.push_back(sum);
            ++ptr[entries[t].col + 1];
            t = u;
        }
        for (std::size_t j = 0; j < cols; ++j) ptr[j + 1] += ptr[j];
        return SparseMatrix(rows, cols, std::move(ptr), std::move(rix), std::move(vals));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    struct ColumnView {
        std::span<const std::size_t> row;
        std::span<const double> value;
        std::size_t size() const { return row.size(); }
    };

    ColumnView column(std::size_t j) const {
        const std::size_t b = col_ptr_[j], e = col_ptr_[j + 1];
        return {{row_idx_.data() + b, e - b}, {values_.data() + b, e - b}};
    }

    std::span<const std::size_t> col_ptr() const { return col_ptr_; }
    std::span<const std::size_t> row_idx() const { return row_idx_; }
    std::span<const double> values() const { return values_; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::size_t> col_ptr_{0};
    std::vector<std::size_t> row_idx_;
    std::vector<double> values_;
};

}  // namespace onmf
