#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "onmf/solver.hpp"
#include "test_util.hpp"

using onmf::DenseMatrix;
using onmf::OrthogonalH;
using onmf::SparseMatrix;

namespace {

OrthogonalH single_column_h(std::size_t r, std::size_t n, std::size_t k, double v) {
    OrthogonalH h(r, n);
    for (std::size_t j = 0; j < n; ++j) h.assign(j, k, v);
    return h;
}

}  // namespace

TEST_CASE("kl_divergence scalar conventions") {
    // D(0, 3) = 3: empty data column approximated by 3.
    {
        const SparseMatrix x(1, 1, {0, 0}, {}, {});
        const DenseMatrix w(1, 1, {3.0});
        CHECK_THAT(onmf::kl_divergence(x, w, single_column_h(1, 1, 0, 1.0)),
                   Catch::Matchers::WithinAbs(3.0, 1e-15));
    }
    // D(2, 1) = 1 - 2 + 2 log 2.
    {
        const SparseMatrix x = SparseMatrix::from_triplets(1, 1, {{0, 0, 2.0}});
        const DenseMatrix w(1, 1, {1.0});
        CHECK_THAT(onmf::kl_divergence(x, w, single_column_h(1, 1, 0, 1.0)),
                   Catch::Matchers::WithinAbs(0.3862943611198906, 1e-12));
    }
}

TEST_CASE("kl_divergence is zero at an exact factorization") {
    const DenseMatrix w(2, 1, {1.0, 2.0});
    const SparseMatrix x =
        SparseMatrix::from_triplets(2, 3, {{0, 0, 2.0}, {1, 0, 4.0},
                                           {0, 1, 1.0}, {1, 1, 2.0},
                                           {0, 2, 3.0}, {1, 2, 6.0}});
    OrthogonalH h(1, 3);
    h.assign(0, 0, 2.0);
    h.assign(1, 0, 1.0);
    h.assign(2, 0, 3.0);
    CHECK_THAT(onmf::kl_divergence(x, w, h), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("kl_divergence returns +inf when a positive cell meets a zero fit") {
    const SparseMatrix x = SparseMatrix::from_triplets(2, 1, {{0, 0, 1.0}});
    const DenseMatrix w(2, 1, {0.0, 1.0});
    CHECK(std::isinf(onmf::kl_divergence(x, w, single_column_h(1, 1, 0, 1.0))));
    // Zero H value with a nonzero data column is infinite as well.
    const DenseMatrix w2(2, 1, {1.0, 1.0});
    CHECK(std::isinf(onmf::kl_divergence(x, w2, single_column_h(1, 1, 0, 0.0))));
}

TEST_CASE("kl_divergence rejects negative data") {
    const SparseMatrix x = SparseMatrix::from_triplets(1, 1, {{0, 0, -1.0}});
    const DenseMatrix w(1, 1, {1.0});
    CHECK_THROWS_AS(onmf::kl_divergence(x, w, single_column_h(1, 1, 0, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("kl_divergence matches the dense objective on random instances") {
    std::mt19937_64 g(29);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t m = 2 + g() % 12, n = 1 + g() % 20, r = 1 + g() % 4;
        const SparseMatrix x = testutil::random_sparse(g, m, n, 0.5, 0.1, 3.0);
        const DenseMatrix w = testutil::random_dense(g, m, r, 0.05, 2.0);
        OrthogonalH h(r, n);
        for (std::size_t j = 0; j < n; ++j)
            h.assign(j, g() % r, testutil::runif(g, 0.0, 2.0));
        const double fast = onmf::kl_divergence(x, w, h);
        const double dense = testutil::dense_kl(
            testutil::densify(x),
            testutil::matmul(w, onmf::orthogonal_h_to_dense(h)));
        if (std::isinf(dense)) {
            CHECK(std::isinf(fast));
        } else {
            CHECK_THAT(fast, Catch::Matchers::WithinRel(dense, 1e-10) ||
                                 Catch::Matchers::WithinAbs(dense, 1e-10));
        }
    }
}

TEST_CASE("frobenius_error on hand-checked instances") {
    const DenseMatrix w(2, 1, {3.0, 4.0});
    const SparseMatrix x =
        SparseMatrix::from_triplets(2, 2, {{0, 0, 3.0}, {1, 0, 4.0}, {0, 1, 6.0}, {1, 1, 8.0}});
    OrthogonalH h(1, 2);
    h.assign(0, 0, 1.0);
    h.assign(1, 0, 2.0);
    CHECK_THAT(onmf::frobenius_error(x, w, h), Catch::Matchers::WithinAbs(0.0, 1e-12));

    // Unassigned columns contribute their full squared norm.
    OrthogonalH empty(1, 2);
    CHECK_THAT(onmf::frobenius_error(x, w, empty),
               Catch::Matchers::WithinAbs(9.0 + 16.0 + 36.0 + 64.0, 1e-12));
}

TEST_CASE("frobenius_error matches the dense objective on random instances") {
    std::mt19937_64 g(31);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t m = 2 + g() % 12, n = 1 + g() % 20, r = 1 + g() % 4;
        const SparseMatrix x = testutil::random_sparse(g, m, n, 0.5, -2.0, 3.0);
        const DenseMatrix w = testutil::random_dense(g, m, r, -1.0, 2.0);
        OrthogonalH h(r, n);
        for (std::size_t j = 0; j < n; ++j)
            h.assign(j, g() % r, testutil::runif(g, 0.0, 2.0));
        const double fast = onmf::frobenius_error(x, w, h);
        const double dense = testutil::frob_sq_diff(
            testutil::densify(x),
            testutil::matmul(w, onmf::orthogonal_h_to_dense(h)));
        CHECK_THAT(fast, Catch::Matchers::WithinRel(dense, 1e-9) ||
                             Catch::Matchers::WithinAbs(dense, 1e-9));
    }
}
