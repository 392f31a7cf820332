#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "onmf/assignment.hpp"
#include "onmf/dense_matrix.hpp"
#include "onmf/labels.hpp"

namespace onmf {

inline constexpr std::size_t kMaxAccuracyClasses = 64;

struct ContingencyTable {
    std::size_t r_true = 0, r_pred = 0;
    std::vector<std::size_t> counts;  // row-major r_true x r_pred

    std::size_t at(std::size_t i, std::size_t j) const { return counts[i * r_pred + j]; }
};

inline ContingencyTable contingency_table(const LabelVector& truth,
                                          const LabelVector& pred) {
    if (truth.size() != pred.size())
        throw std::invalid_argument("contingency_table: label vectors differ in length");
    ContingencyTable t;
    t.r_true = truth.class_count();
    t.r_pred = pred.class_count();
    t.counts.assign(t.r_true * t.r_pred, 0);
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++t.counts[truth.labels[i] * t.r_pred + pred.labels[i]];
    return t;
}

// Fraction of points whose predicted cluster matches the true one under the
// best cluster relabeling, found exactly on the contingency table.
inline double clustering_accuracy(const LabelVector& truth, const LabelVector& pred) {
    if (truth.size() == 0)
        throw std::invalid_argument("clustering_accuracy: empty label vectors");
    const ContingencyTable t = contingency_table(truth, pred);
    if (t.r_true > kMaxAccuracyClasses || t.r_pred > kMaxAccuracyClasses)
        throw std::invalid_argument("clustering_accuracy: more than 64 classes");
    std::vector<double> cost(t.r_true * t.r_pred);
    for (std::size_t i = 0; i < cost.size(); ++i)
        cost[i] = -static_cast<double>(t.counts[i]);
    const AssignmentResult a = min_cost_assignment(cost, t.r_true, t.r_pred);
    std::size_t matched = 0;
    for (std::size_t i = 0; i < t.r_true; ++i)
        if (a.col_of_row[i] != AssignmentResult::kNoMatch) matched += t.at(i, a.col_of_row[i]);
    return static_cast<double>(matched) / static_cast<double>(truth.size());
}

// Mean-removed spectral angle in [0, 100]: the angle between the centered
// vectors scaled by 100/pi. Invariant under y -> a*y + b with a > 0. The
// angle is computed as 2*atan2(|u - v|, |u + v|) on the centered unit
// vectors, which stays fully accurate near 0 and 180 degrees where the
// arccos-of-cosine form loses half its digits.
inline double mrsa(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("mrsa: vectors differ in length");
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("mrsa: empty vectors");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = x[i] - mx, b = y[i] - my;
        nx += a * a;
        ny += b * b;
    }
    if (nx == 0.0 || ny == 0.0)
        throw std::invalid_argument("mrsa: constant vector has no direction");
    nx = std::sqrt(nx);
    ny = std::sqrt(ny);
    double diff = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = (x[i] - mx) / nx, b = (y[i] - my) / ny;
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    const double theta = 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
    return 100.0 * (theta / std::numbers::pi);
}

struct MatchedMrsa {
    double value = 0.0;
    std::vector<std::size_t> permutation;  // estimated column matched to each true column
};

// Minimum over column permutations of the mean MRSA between matched columns,
// solved exactly as an assignment problem.
inline MatchedMrsa matched_mrsa(const DenseMatrix& w_est, const DenseMatrix& w_true) {
    if (w_est.rows() != w_true.rows() || w_est.cols() != w_true.cols())
        throw std::invalid_argument("matched_mrsa: shape mismatch");
    const std::size_t r = w_true.cols();
    if (r == 0) throw std::invalid_argument("matched_mrsa: no columns");
    std::vector<double> cost(r * r);
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t l = 0; l < r; ++l) cost[k * r + l] = mrsa(w_true.col(k), w_est.col(l));
    const AssignmentResult a = min_cost_assignment(cost, r, r);
    MatchedMrsa out;
    out.value = a.cost / static_cast<double>(r);
    out.permutation = a.col_of_row;
    return out;
}

}  // namespace onmf
