#pragma once

// Shared test oracles. These recompute solver quantities by independent
// routes: dense arithmetic, 1-D golden-section minimization, central finite
// differences, and brute-force search over permutations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "onmf/dense_matrix.hpp"
#include "onmf/labels.hpp"
#include "onmf/orthogonal_h.hpp"
#include "onmf/sparse_matrix.hpp"
#include "onmf/synth.hpp"

namespace testutil {

using onmf::DenseMatrix;
using onmf::LabelVector;
using onmf::OrthogonalH;
using onmf::SparseMatrix;
using onmf::Triplet;

inline DenseMatrix densify(const SparseMatrix& x) {
    DenseMatrix out(x.rows(), x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const auto cv = x.column(j);
        for (std::size_t t = 0; t < cv.size(); ++t) out(cv.row[t], j) = cv.value[t];
    }
    return out;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double bv = b(k, j);
            if (bv == 0.0) continue;
            for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) += a(i, k) * bv;
        }
    return out;
}

inline double frob_sq_diff(const DenseMatrix& a, const DenseMatrix& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const double d = a(i, j) - b(i, j);
            s += d * d;
        }
    return s;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            s = std::max(s, std::abs(a(i, j) - b(i, j)));
    return s;
}

// Elementwise KL divergence D(x | y) with the conventions 0*log(0) = 0 and
// D(0, y) = y; +inf when x_i > 0 meets y_i = 0.
inline double column_kl(std::span<const double> x, std::span<const double> y) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0) {
            if (y[i] == 0.0) return std::numeric_limits<double>::infinity();
            total += y[i] - x[i] + x[i] * std::log(x[i] / y[i]);
        } else {
            total += y[i];
        }
    }
    return total;
}

// Dense KL objective D(X | WH) over all cells.
inline double dense_kl(const DenseMatrix& x, const DenseMatrix& wh) {
    double total = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const double c = column_kl(x.col(j), wh.col(j));
        if (std::isinf(c)) return c;
        total += c;
    }
    return total;
}

// Golden-section minimization of a unimodal f over [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double rel_tol = 1e-12) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > rel_tol * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2.0;
}

// Central finite-difference gradient of f at point w.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> w, double step_scale = 1e-6) {
    std::vector<double> point(w.begin(), w.end());
    std::vector<double> grad(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double h = step_scale * (1.0 + std::abs(point[i]));
        const double orig = point[i];
        point[i] = orig + h;
        const double fp = f(point);
        point[i] = orig - h;
        const double fm = f(point);
        point[i] = orig;
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

// Best achievable overlap count over all cluster relabelings, by exhaustive
// search over permutations of the padded square contingency table.
inline std::size_t brute_force_best_overlap(const LabelVector& truth,
                                            const LabelVector& pred) {
    const std::size_t r = std::max(truth.class_count(), pred.class_count());
    std::vector<std::size_t> counts(r * r, 0);
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++counts[truth.labels[i] * r + pred.labels[i]];
    std::vector<std::size_t> perm(r);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t s = 0;
        for (std::size_t i = 0; i < r; ++i) s += counts[i * r + perm[i]];
        best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// --- random instance helpers ---------------------------------------------

inline double runif(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(g() >> 11) * 0x1.0p-53);
}

inline SparseMatrix random_sparse(std::mt19937_64& g, std::size_t m, std::size_t n,
                                  double density, double lo, double hi) {
    std::vector<Triplet> entries;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
            if (runif(g, 0.0, 1.0) < density) entries.push_back({i, j, runif(g, lo, hi)});
    return SparseMatrix::from_triplets(m, n, std::move(entries));
}

inline DenseMatrix random_dense(std::mt19937_64& g, std::size_t m, std::size_t n,
                                double lo, double hi) {
    DenseMatrix out(m, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) out(i, j) = runif(g, lo, hi);
    return out;
}

inline LabelVector random_labels(std::mt19937_64& g, std::size_t n, std::size_t r) {
    LabelVector out;
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.labels[i] = g() % r;
    return out;
}

}  // namespace testutil
