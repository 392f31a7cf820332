#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "onmf/dense_matrix.hpp"
#include "onmf/orthogonal_h.hpp"
#include "onmf/sparse_matrix.hpp"

namespace onmf {

enum class Divergence { Frobenius, KL };

struct SolverConfig {
    Divergence divergence = Divergence::Frobenius;
    std::size_t rank = 1;
    std::size_t maxiter = 100;
    double delta = 1e-6;
    double epsilon = 1e-3;  // log shift used by the KL column scores
    std::uint64_t seed = 0;

    void validate() const {
        if (rank < 1) throw std::invalid_argument("SolverConfig: rank must be >= 1");
        if (maxiter < 1) throw std::invalid_argument("SolverConfig: maxiter must be >= 1");
        if (!(delta > 0.0)) throw std::invalid_argument("SolverConfig: delta must be > 0");
        if (!(epsilon > 0.0)) throw std::invalid_argument("SolverConfig: epsilon must be > 0");
    }
};

struct SolverReport {
    std::size_t iterations = 0;
    std::vector<double> objective_trace;  // one value per iteration, after the W update
    std::vector<double> h_change_trace;   // Frobenius norm of H - H_prev per iteration
    double wall_time_s = 0.0;
    bool converged = false;
    // Columns of the final H pinned to value zero: all-zero data columns under
    // KL, and columns whose best score was nonpositive under Frobenius.
    std::size_t zero_value_columns = 0;
};

namespace detail {

inline void check_factor_shapes(const SparseMatrix& x, const DenseMatrix& w) {
    if (w.rows() != x.rows())
        throw std::invalid_argument("solver: W row count != X row count");
    if (w.cols() == 0) throw std::invalid_argument("solver: W has no columns");
}

inline void check_h_shape(const SparseMatrix& x, const OrthogonalH& h) {
    if (h.column_count() != x.cols())
        throw std::invalid_argument("solver: H column count != X column count");
}

inline void check_nonnegative(const SparseMatrix& x) {
    for (double v : x.values())
        if (v < 0.0) throw std::invalid_argument("solver: X has negative entries");
}

inline std::vector<double> column_sums(const DenseMatrix& w) {
    std::vector<double> sums(w.cols(), 0.0);
    for (std::size_t k = 0; k < w.cols(); ++k) {
        double s = 0.0;
        for (double v : w.col(k)) s += v;
        sums[k] = s;
    }
    return sums;
}

inline std::vector<double> column_sq_norms(const DenseMatrix& w) {
    std::vector<double> sq(w.cols(), 0.0);
    for (std::size_t k = 0; k < w.cols(); ++k) {
        double s = 0.0;
        for (double v : w.col(k)) s += v * v;
        sq[k] = s;
    }
    return sq;
}

// Resets the W column of every empty cluster to the data column with the
// largest current per-column approximation error; distinct columns are used
// when several clusters are empty, and all-zero data columns are never used.
inline void repair_empty_clusters(const SparseMatrix& x, const OrthogonalH& h,
                                  DenseMatrix& w, Divergence divergence) {
    const std::vector<std::size_t> members = h.member_counts();
    std::vector<std::size_t> empty;
    for (std::size_t k = 0; k < members.size(); ++k)
        if (members[k] == 0) empty.push_back(k);
    if (empty.empty()) return;

    const std::size_t n = x.cols();
    std::vector<double> error(n, 0.0);
    if (divergence == Divergence::Frobenius) {
        const std::vector<double> wsq = column_sq_norms(w);
        for (std::size_t j = 0; j < n; ++j) {
            const auto cv = x.column(j);
            double xx = 0.0;
            for (double v : cv.value) xx += v * v;
            const std::size_t k = h.assignment(j);
            const double v = h.value(j);
            if (k != OrthogonalH::kUnassigned && v > 0.0) {
                double xw = 0.0;
                for (std::size_t t = 0; t < cv.size(); ++t)
                    xw += cv.value[t] * w(cv.row[t], k);
                error[j] = xx - 2.0 * v * xw + v * v * wsq[k];
            } else {
                error[j] = xx;
            }
        }
    } else {
        const std::vector<double> wsum = column_sums(w);
        const double inf = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            const auto cv = x.column(j);
            double colsum = 0.0;
            for (double v : cv.value) colsum += v;
            const std::size_t k = h.assignment(j);
            const double v = h.value(j);
            if (k == OrthogonalH::kUnassigned || v == 0.0) {
                // Approximated by the zero column; any positive entry makes
                // the divergence infinite.
                error[j] = colsum > 0.0 ? inf : 0.0;
                continue;
            }
            double e = v * wsum[k] - colsum;
            for (std::size_t t = 0; t < cv.size(); ++t) {
                const double xv = cv.value[t];
                if (xv <= 0.0) continue;
                const double y = v * w(cv.row[t], k);
                if (y == 0.0) {
                    e = inf;
                    break;
                }
                e += xv * std::log(xv / y);
            }
            error[j] = e;
        }
    }

    std::vector<bool> used(n, false);
    for (std::size_t k : empty) {
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j] || x.column(j).size() == 0) continue;
            if (best == n || error[j] > error[best]) best = j;
        }
        if (best == n) return;  // no nonzero column left; leave W as-is
        used[best] = true;
        auto wk = w.col(k);
        for (double& v : wk) v = 0.0;
        const auto cv = x.column(best);
        for (std::size_t t = 0; t < cv.size(); ++t) wk[cv.row[t]] = cv.value[t];
    }
}

}  // namespace detail

// Kullback-Leibler divergence D(X | WH) with the conventions 0*log(0) = 0 and
// D(0, y) = y. Returns +inf when some X(i,j) > 0 meets (WH)(i,j) = 0.
inline double kl_divergence(const SparseMatrix& x, const DenseMatrix& w,
                            const OrthogonalH& h) {
    detail::check_factor_shapes(x, w);
    detail::check_h_shape(x, h);
    detail::check_nonnegative(x);
    const std::vector<double> wsum = detail::column_sums(w);
    const double inf = std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const auto cv = x.column(j);
        double colsum = 0.0;
        for (double v : cv.value) colsum += v;
        const std::size_t k = h.assignment(j);
        const double v = k == OrthogonalH::kUnassigned ? 0.0 : h.value(j);
        if (v == 0.0) {
            if (colsum > 0.0) return inf;
            continue;  // D(0, 0) = 0
        }
        total += v * wsum[k] - colsum;
        for (std::size_t t = 0; t < cv.size(); ++t) {
            const double xv = cv.value[t];
            if (xv <= 0.0) continue;
            const double y = v * w(cv.row[t], k);
            if (y == 0.0) return inf;
            total += xv * std::log(xv / y);
        }
    }
    return total < 0.0 ? 0.0 : total;
}

// Squared Frobenius error ||X - WH||_F^2, exploiting the one-nonzero-per-column
// structure of H: per column ||x||^2 - 2 v x'w + v^2 ||w||^2.
inline double frobenius_error(const SparseMatrix& x, const DenseMatrix& w,
                              const OrthogonalH& h) {
    detail::check_factor_shapes(x, w);
    detail::check_h_shape(x, h);
    const std::vector<double> wsq = detail::column_sq_norms(w);
    double total = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const auto cv = x.column(j);
        double xx = 0.0;
        for (double v : cv.value) xx += v * v;
        const std::size_t k = h.assignment(j);
        const double v = k == OrthogonalH::kUnassigned ? 0.0 : h.value(j);
        if (v == 0.0) {
            total += xx;
            continue;
        }
        double xw = 0.0;
        for (std::size_t t = 0; t < cv.size(); ++t) xw += cv.value[t] * w(cv.row[t], k);
        total += xx - 2.0 * v * xw + v * v * wsq[k];
    }
    return total < 0.0 ? 0.0 : total;
}

// Frobenius column assignment: every column goes to the cluster whose
// normalized W column has the largest inner product with it (ties to the
// smallest index), with value max(0, x'w / ||w||^2). No row scaling.
inline OrthogonalH fro_assign_columns(const SparseMatrix& x, const DenseMatrix& w) {
    detail::check_factor_shapes(x, w);
    const std::size_t m = x.rows(), n = x.cols(), r = w.cols();
    std::vector<double> norm(r, 0.0);
    {
        const std::vector<double> sq = detail::column_sq_norms(w);
        for (std::size_t k = 0; k < r; ++k) {
            norm[k] = std::sqrt(sq[k]);
            if (norm[k] == 0.0)
                throw std::invalid_argument("fro_assign_columns: W has an all-zero column");
        }
    }
    std::vector<double> wn(m * r);
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t i = 0; i < m; ++i) wn[k * m + i] = w(i, k) / norm[k];

    OrthogonalH h(r, n);
    std::vector<double> score(r);
    for (std::size_t j = 0; j < n; ++j) {
        const auto cv = x.column(j);
        for (std::size_t k = 0; k < r; ++k) {
            double s = 0.0;
            const double* wk = wn.data() + k * m;
            for (std::size_t t = 0; t < cv.size(); ++t) s += cv.value[t] * wk[cv.row[t]];
            score[k] = s;
        }
        std::size_t best = 0;
        for (std::size_t k = 1; k < r; ++k)
            if (score[k] > score[best]) best = k;
        const double v = score[best] / norm[best];
        h.assign(j, best, v > 0.0 ? v : 0.0);
    }
    return h;
}

inline OrthogonalH fro_update_h(const SparseMatrix& x, const DenseMatrix& w) {
    OrthogonalH h = fro_assign_columns(x, w);
    h.scale_rows();
    return h;
}

// W(:,k) = sum over the columns of cluster k of X(:,j) * H(k,j); empty
// clusters are then repaired from the worst-approximated data column.
inline DenseMatrix fro_update_w(const SparseMatrix& x, const OrthogonalH& h) {
    detail::check_h_shape(x, h);
    if (h.cluster_count() == 0) throw std::invalid_argument("fro_update_w: H has no rows");
    DenseMatrix w(x.rows(), h.cluster_count());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const std::size_t k = h.assignment(j);
        const double v = h.value(j);
        if (k == OrthogonalH::kUnassigned || v == 0.0) continue;
        const auto cv = x.column(j);
        auto wk = w.col(k);
        for (std::size_t t = 0; t < cv.size(); ++t) wk[cv.row[t]] += cv.value[t] * v;
    }
    detail::repair_empty_clusters(x, h, w, Divergence::Frobenius);
    return w;
}

// KL column assignment: scores A(k,j) = sum_i X(i,j) log(Wn(i,k) + eps) with
// Wn the column-stochastic W (ties to the smallest index), and the optimal
// value e'X(:,j) / e'W(:,k). All-zero data columns go to the cluster with the
// smallest column sum with value zero. No row scaling.
inline OrthogonalH kl_assign_columns(const SparseMatrix& x, const DenseMatrix& w,
                                     double epsilon) {
    detail::check_factor_shapes(x, w);
    detail::check_nonnegative(x);
    if (!(epsilon > 0.0)) throw std::invalid_argument("kl_assign_columns: epsilon must be > 0");
    const std::size_t m = x.rows(), n = x.cols(), r = w.cols();
    for (double v : w.values())
        if (v < 0.0) throw std::invalid_argument("kl_assign_columns: W has negative entries");
    const std::vector<double> wsum = detail::column_sums(w);
    std::size_t smallest_sum = 0;
    for (std::size_t k = 0; k < r; ++k) {
        if (wsum[k] == 0.0)
            throw std::invalid_argument("kl_assign_columns: W has an all-zero column");
        if (wsum[k] < wsum[smallest_sum]) smallest_sum = k;
    }
    std::vector<double> logwn(m * r);
    for (std::size_t k = 0; k < r; ++k)
        for (std::size_t i = 0; i < m; ++i)
            logwn[k * m + i] = std::log(w(i, k) / wsum[k] + epsilon);

    OrthogonalH h(r, n);
    std::vector<double> score(r);
    for (std::size_t j = 0; j < n; ++j) {
        const auto cv = x.column(j);
        double colsum = 0.0;
        for (double v : cv.value) colsum += v;
        if (colsum == 0.0) {
            h.assign(j, smallest_sum, 0.0);
            continue;
        }
        for (std::size_t k = 0; k < r; ++k) {
            double s = 0.0;
            const double* lk = logwn.data() + k * m;
            for (std::size_t t = 0; t < cv.size(); ++t) s += cv.value[t] * lk[cv.row[t]];
            score[k] = s;
        }
        std::size_t best = 0;
        for (std::size_t k = 1; k < r; ++k)
            if (score[k] > score[best]) best = k;
        h.assign(j, best, colsum / wsum[best]);
    }
    return h;
}

inline OrthogonalH kl_update_h(const SparseMatrix& x, const DenseMatrix& w,
                               double epsilon) {
    OrthogonalH h = kl_assign_columns(x, w, epsilon);
    h.scale_rows();
    return h;
}

// W(:,k) = (sum of the cluster's data columns) / (sum of the cluster's H
// values): the scaled plain average. Empty clusters are repaired as above.
inline DenseMatrix kl_update_w(const SparseMatrix& x, const OrthogonalH& h) {
    detail::check_h_shape(x, h);
    if (h.cluster_count() == 0) throw std::invalid_argument("kl_update_w: H has no rows");
    const std::size_t r = h.cluster_count();
    DenseMatrix w(x.rows(), r);
    std::vector<double> den(r, 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const std::size_t k = h.assignment(j);
        const double v = h.value(j);
        if (k == OrthogonalH::kUnassigned || v == 0.0) continue;
        den[k] += v;
        const auto cv = x.column(j);
        auto wk = w.col(k);
        for (std::size_t t = 0; t < cv.size(); ++t) wk[cv.row[t]] += cv.value[t];
    }
    for (std::size_t k = 0; k < r; ++k) {
        if (den[k] == 0.0) continue;
        for (double& v : w.col(k)) v /= den[k];
    }
    detail::repair_empty_clusters(x, h, w, Divergence::KL);
    return w;
}

struct OnmfResult {
    DenseMatrix w;
    OrthogonalH h;
    SolverReport report;
};

// Called after each iteration's W update with (iteration, H, W).
using IterationObserver =
    std::function<void(std::size_t, const OrthogonalH&, const DenseMatrix&)>;

// Alternating scheme: assign and row-scale H, update W, evaluate the
// objective, and stop once ||H - H_prev||_F < delta or maxiter is reached.
// The first iteration compares H against the all-unassigned sentinel, so the
// loop always runs at least once.
inline OnmfResult run_onmf(const SparseMatrix& x, const DenseMatrix& w0,
                           const SolverConfig& config,
                           const IterationObserver& observer = {}) {
    config.validate();
    if (w0.rows() != x.rows() || w0.cols() != config.rank)
        throw std::invalid_argument("run_onmf: W0 must be rows(X) x rank");
    if (config.rank > x.cols())
        throw std::invalid_argument("run_onmf: rank exceeds the number of data columns");
    {
        const std::vector<double> sq = detail::column_sq_norms(w0);
        for (double s : sq)
            if (s == 0.0) throw std::invalid_argument("run_onmf: W0 has an all-zero column");
    }
    if (config.divergence == Divergence::KL) {
        detail::check_nonnegative(x);
        for (double v : w0.values())
            if (v < 0.0) throw std::invalid_argument("run_onmf: W0 has negative entries");
    }

    const auto t0 = std::chrono::steady_clock::now();
    DenseMatrix w = w0;
    OrthogonalH h;
    OrthogonalH h_prev(config.rank, x.cols());
    SolverReport report;
    for (std::size_t it = 1; it <= config.maxiter; ++it) {
        h = config.divergence == Divergence::Frobenius
                ? fro_update_h(x, w)
                : kl_update_h(x, w, config.epsilon);
        const double change = h_change_norm(h, h_prev);
        w = config.divergence == Divergence::Frobenius ? fro_update_w(x, h)
                                                       : kl_update_w(x, h);
        const double objective = config.divergence == Divergence::Frobenius
                                     ? frobenius_error(x, w, h)
                                     : kl_divergence(x, w, h);
        report.objective_trace.push_back(objective);
        report.h_change_trace.push_back(change);
        report.iterations = it;
        if (observer) observer(it, h, w);
        if (change < config.delta) {
            report.converged = true;
            break;
        }
        h_prev = h;
    }
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (std::size_t j = 0; j < h.column_count(); ++j)
        if (h.value(j) == 0.0) ++report.zero_value_columns;
    return {std::move(w), std::move(h), std::move(report)};
}

}  // namespace onmf
