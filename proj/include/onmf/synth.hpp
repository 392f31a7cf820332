#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "onmf/dense_matrix.hpp"
#include "onmf/labels.hpp"
#include "onmf/sparse_matrix.hpp"

namespace onmf {

enum class WLaw { DirichletColumns, DisjointSupport };
enum class NoiseKind { None, Poisson, Gaussian };

// Planted-cluster generator specification. Columns are assigned to clusters
// round-robin, scaled uniformly from [scale_low, scale_high], and perturbed
// by the chosen noise. All randomness comes from `seed`.
struct SyntheticSpec {
    std::size_t m = 50, n = 500, r = 5;
    WLaw w_law = WLaw::DisjointSupport;
    double scale_low = 5.0, scale_high = 15.0;
    NoiseKind noise = NoiseKind::None;
    double gaussian_sigma = 0.0;
    std::optional<double> small_norm_factor;  // shrinks the last true column
    std::uint64_t seed = 0;

    void validate() const {
        if (r < 1) throw std::invalid_argument("SyntheticSpec: r must be >= 1");
        if (n < r) throw std::invalid_argument("SyntheticSpec: n must be >= r");
        if (m < 1) throw std::invalid_argument("SyntheticSpec: m must be >= 1");
        if (w_law == WLaw::DisjointSupport && m < r)
            throw std::invalid_argument("SyntheticSpec: DisjointSupport needs m >= r");
        if (!(scale_low > 0.0) || !(scale_high >= scale_low))
            throw std::invalid_argument("SyntheticSpec: need 0 < scale_low <= scale_high");
        if (noise == NoiseKind::Gaussian && !(gaussian_sigma > 0.0))
            throw std::invalid_argument("SyntheticSpec: Gaussian noise needs sigma > 0");
        if (small_norm_factor &&
            (!(*small_norm_factor > 0.0) || !(*small_norm_factor <= 1.0)))
            throw std::invalid_argument("SyntheticSpec: small_norm_factor must be in (0, 1]");
    }
};

struct SyntheticData {
    SparseMatrix x;
    LabelVector labels;
    DenseMatrix w_true;
};

namespace detail {

// Fixed-width samplers so that generation is bitwise reproducible for a given
// seed on any conforming platform.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

inline double normal(std::mt19937_64& g) {
    const double u1 = 1.0 - uniform01(g);  // (0, 1], keeps the log finite
    const double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Inversion by sequential search below mean 30, rounded normal approximation
// above.
inline std::uint64_t poisson(std::mt19937_64& g, double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 30.0) {
        const double u = uniform01(g);
        double p = std::exp(-mean), cdf = p;
        std::uint64_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    const double v = mean + std::sqrt(mean) * normal(g);
    return v <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(v));
}

}  // namespace detail

// Draws (X, labels, W_true): W_true columns sum to one under either law,
// labels are round-robin, and X(:,j) = scale_j * W_true(:,label_j) plus
// noise. Poisson replaces each entry by a draw with that mean; Gaussian adds
// sigma-scaled noise clipped at zero.
inline SyntheticData generate(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 g(spec.seed);
    const std::size_t m = spec.m, n = spec.n, r = spec.r;

    DenseMatrix w(m, r);
    for (std::size_t k = 0; k < r; ++k) {
        auto wk = w.col(k);
        if (spec.w_law == WLaw::DirichletColumns) {
            for (std::size_t i = 0; i < m; ++i)
                wk[i] = -std::log(1.0 - detail::uniform01(g));
        } else {
            const std::size_t lo = k * m / r, hi = (k + 1) * m / r;
            for (std::size_t i = lo; i < hi; ++i) wk[i] = detail::uniform(g, 0.5, 1.5);
        }
        double sum = 0.0;
        for (double v : wk) sum += v;
        for (double& v : wk) v /= sum;
    }
    if (spec.small_norm_factor)
        for (double& v : w.col(r - 1)) v *= *spec.small_norm_factor;

    LabelVector labels;
    labels.labels.resize(n);
    std::vector<Triplet> entries;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t k = j % r;
        labels.labels[j] = k;
        const double scale = detail::uniform(g, spec.scale_low, spec.scale_high);
        const auto wk = w.col(k);
        switch (spec.noise) {
            case NoiseKind::None:
                for (std::size_t i = 0; i < m; ++i)
                    if (wk[i] > 0.0) entries.push_back({i, j, scale * wk[i]});
                break;
            case NoiseKind::Poisson:
                for (std::size_t i = 0; i < m; ++i) {
                    if (wk[i] <= 0.0) continue;
                    const std::uint64_t c = detail::poisson(g, scale * wk[i]);
                    if (c > 0) entries.push_back({i, j, static_cast<double>(c)});
                }
                break;
            case NoiseKind::Gaussian:
                for (std::size_t i = 0; i < m; ++i) {
                    const double v =
                        scale * wk[i] + spec.gaussian_sigma * detail::normal(g);
                    if (v > 0.0) entries.push_back({i, j, v});
                }
                break;
        }
    }
    return {SparseMatrix::from_triplets(m, n, std::move(entries)), std::move(labels),
            std::move(w)};
}

}  // namespace onmf
