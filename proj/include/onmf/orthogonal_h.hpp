#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "onmf/dense_matrix.hpp"

namespace onmf {

// Orthogonal nonnegative factor H with at most one nonzero per column, stored
// as one (cluster index, value) pair per column. Solvers keep H in this form;
// it is never densified on the hot path.
class OrthogonalH {
public:
    static constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

    OrthogonalH() = default;

    // All columns start unassigned with value zero.
    OrthogonalH(std::size_t r, std::size_t n)
        : r_(r), n_(n), assignment_(n, kUnassigned), value_(n, 0.0) {}

    std::size_t cluster_count() const { return r_; }
    std::size_t column_count() const { return n_; }

    std::size_t assignment(std::size_t j) const { return assignment_[j]; }
    double value(std::size_t j) const { return value_[j]; }

    void assign(std::size_t j, std::size_t k, double v) {
        if (k >= r_)
            throw std::invalid_argument("OrthogonalH: cluster index out of range");
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("OrthogonalH: value must be finite and >= 0");
        assignment_[j] = k;
        value_[j] = v;
    }

    // Number of columns per cluster with a strictly positive value; a cluster
    // with none is empty.
    std::vector<std::size_t> member_counts() const {
        std::vector<std::size_t> counts(r_, 0);
        for (std::size_t j = 0; j < n_; ++j)
            if (assignment_[j] != kUnassigned && value_[j] > 0.0) ++counts[assignment_[j]];
        return counts;
    }

    std::vector<double> row_norms() const {
        std::vector<double> sq(r_, 0.0);
        for (std::size_t j = 0; j < n_; ++j)
            if (assignment_[j] != kUnassigned) sq[assignment_[j]] += value_[j] * value_[j];
        for (double& s : sq) s = std::sqrt(s);
        return sq;
    }

    // Rescales every nonempty row to unit l2 norm; returns the applied
    // factors (1.0 for empty rows).
    std::vector<double> scale_rows() {
        std::vector<double> factors = row_norms();
        for (double& f : factors)
            if (f == 0.0) f = 1.0;
        for (std::size_t j = 0; j < n_; ++j)
            if (assignment_[j] != kUnassigned) value_[j] /= factors[assignment_[j]];
        return factors;
    }

private:
    std::size_t r_ = 0, n_ = 0;
    std::vector<std::size_t> assignment_;
    std::vector<double> value_;
};

inline DenseMatrix orthogonal_h_to_dense(const OrthogonalH& h) {
    DenseMatrix out(h.cluster_count(), h.column_count());
    for (std::size_t j = 0; j < h.column_count(); ++j)
        if (h.assignment(j) != OrthogonalH::kUnassigned) out(h.assignment(j), j) = h.value(j);
    return out;
}

// Frobenius norm of the densified difference, computed in O(n) from the
// compact form: columns agreeing on the cluster index contribute
// (v - v')^2, disagreeing columns contribute v^2 + v'^2.
inline double h_change_norm(const OrthogonalH& h, const OrthogonalH& h_prev) {
    if (h.cluster_count() != h_prev.cluster_count() ||
        h.column_count() != h_prev.column_count())
        throw std::invalid_argument("h_change_norm: shape mismatch");
    double sq = 0.0;
    for (std::size_t j = 0; j < h.column_count(); ++j) {
        const double v = h.value(j), p = h_prev.value(j);
        if (h.assignment(j) == h_prev.assignment(j)) {
            const double d = v - p;
            sq += d * d;
        } else {
            sq += v * v + p * p;
        }
    }
    return std::sqrt(sq);
}

}  // namespace onmf
