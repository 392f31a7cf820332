#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "onmf/dense_matrix.hpp"
#include "onmf/sparse_matrix.hpp"

namespace onmf {

enum class InitMethod { GreedyProjection, ProvidedIndices, RandomColumns };

struct InitSelection {
    std::vector<std::size_t> indices;
    InitMethod method = InitMethod::GreedyProjection;
};

namespace detail {

inline std::vector<double> column_sq_norms(const SparseMatrix& x) {
    std::vector<double> sq(x.cols(), 0.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double s = 0.0;
        for (double v : x.column(j).value) s += v * v;
        sq[j] = s;
    }
    return sq;
}

// Greedy residual-norm selection: repeatedly pick the column with the largest
// squared residual norm and deflate all residuals against the orthonormal
// basis of the picks so far. O(nnz * r) overall.
inline std::vector<std::size_t> greedy_projection_indices(const SparseMatrix& x,
                                                          std::size_t r) {
    const std::size_t m = x.rows(), n = x.cols();
    std::vector<double> residual = column_sq_norms(x);
    for (double& s : residual)
        if (s == 0.0) s = -1.0;  // all-zero columns are never candidates

    std::vector<std::size_t> picked;
    std::vector<std::vector<double>> basis;
    for (std::size_t step = 0; step < r; ++step) {
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j)
            if (residual[j] >= 0.0 && (best == n || residual[j] > residual[best])) best = j;
        if (best == n)
            throw std::invalid_argument("init_w: fewer nonzero columns than rank");
        picked.push_back(best);
        residual[best] = -1.0;

        std::vector<double> d(m, 0.0);
        const auto cv = x.column(best);
        for (std::size_t t = 0; t < cv.size(); ++t) d[cv.row[t]] = cv.value[t];
        for (int pass = 0; pass < 2; ++pass) {
            for (const std::vector<double>& q : basis) {
                double dot = 0.0;
                for (std::size_t i = 0; i < m; ++i) dot += q[i] * d[i];
                for (std::size_t i = 0; i < m; ++i) d[i] -= dot * q[i];
            }
        }
        double nrm = 0.0;
        for (double v : d) nrm += v * v;
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) continue;  // column already in the span; keep the pick
        for (double& v : d) v /= nrm;

        for (std::size_t j = 0; j < n; ++j) {
            if (residual[j] < 0.0) continue;
            const auto cj = x.column(j);
            double p = 0.0;
            for (std::size_t t = 0; t < cj.size(); ++t) p += cj.value[t] * d[cj.row[t]];
            residual[j] -= p * p;
            if (residual[j] < 0.0) residual[j] = 0.0;
        }
        basis.push_back(std::move(d));
    }
    return picked;
}

}  // namespace detail

// Builds the initial W from r data columns chosen by the given method.
// GreedyProjection is deterministic; RandomColumns draws r distinct nonzero
// columns from the seeded generator; ProvidedIndices passes `provided`
// through unchanged after validation.
inline std::pair<DenseMatrix, InitSelection> init_w(
    const SparseMatrix& x, std::size_t r, InitMethod method, std::uint64_t seed = 0,
    std::span<const std::size_t> provided = {}) {
    const std::size_t n = x.cols();
    if (r < 1 || r > n)
        throw std::invalid_argument("init_w: rank must be in [1, cols(X)]");

    InitSelection sel;
    sel.method = method;
    switch (method) {
        case InitMethod::GreedyProjection: {
            std::size_t nonzero = 0;
            for (double s : detail::column_sq_norms(x))
                if (s > 0.0) ++nonzero;
            if (nonzero < r)
                throw std::invalid_argument("init_w: fewer nonzero columns than rank");
            sel.indices = detail::greedy_projection_indices(x, r);
            break;
        }
        case InitMethod::ProvidedIndices: {
            if (provided.size() != r)
                throw std::invalid_argument("init_w: provided index count != rank");
            std::vector<bool> seen(n, false);
            for (std::size_t j : provided) {
                if (j >= n) throw std::invalid_argument("init_w: provided index out of range");
                if (seen[j]) throw std::invalid_argument("init_w: provided indices not distinct");
                seen[j] = true;
            }
            sel.indices.assign(provided.begin(), provided.end());
            break;
        }
        case InitMethod::RandomColumns: {
            std::vector<std::size_t> pool;
            const std::vector<double> sq = detail::column_sq_norms(x);
            for (std::size_t j = 0; j < n; ++j)
                if (sq[j] > 0.0) pool.push_back(j);
            if (pool.size() < r)
                throw std::invalid_argument("init_w: fewer nonzero columns than rank");
            std::mt19937_64 gen(seed);
            for (std::size_t t = 0; t < r; ++t) {
                const std::size_t u = t + gen() % (pool.size() - t);
                std::swap(pool[t], pool[u]);
                sel.indices.push_back(pool[t]);
            }
            break;
        }
    }

    DenseMatrix w(x.rows(), r);
    for (std::size_t k = 0; k < r; ++k) {
        const auto cv = x.column(sel.indices[k]);
        auto wk = w.col(k);
        for (std::size_t t = 0; t < cv.size(); ++t) wk[cv.row[t]] = cv.value[t];
    }
    return {std::move(w), std::move(sel)};
}

}  // namespace onmf
