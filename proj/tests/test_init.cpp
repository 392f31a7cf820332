#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "onmf/init.hpp"
#include "test_util.hpp"

using onmf::DenseMatrix;
using onmf::InitMethod;
using onmf::SparseMatrix;

TEST_CASE("greedy init with rank 1 picks the largest-norm column") {
    const SparseMatrix x = SparseMatrix::from_triplets(
        2, 3, {{0, 0, 1.0}, {0, 1, 3.0}, {1, 1, 4.0}, {1, 2, 2.0}});
    const auto [w, sel] = onmf::init_w(x, 1, InitMethod::GreedyProjection);
    REQUIRE(sel.indices == std::vector<std::size_t>{1});
    CHECK(w(0, 0) == 3.0);
    CHECK(w(1, 0) == 4.0);
}

TEST_CASE("greedy init picks one column per separable block") {
    std::mt19937_64 g(103);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t r = 2 + g() % 3, band = 2 + g() % 3, per = 4;
        const std::size_t m = r * band, n = r * per;
        std::vector<double> base(m);
        for (double& v : base) v = testutil::runif(g, 0.5, 1.5);
        std::vector<onmf::Triplet> trips;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t k = j % r;
            const double scale = testutil::runif(g, 0.5, 1.5);
            for (std::size_t b = 0; b < band; ++b)
                trips.push_back({k * band + b, j, scale * base[k * band + b]});
        }
        const SparseMatrix x = SparseMatrix::from_triplets(m, n, trips);
        const auto [w, sel] = onmf::init_w(x, r, InitMethod::GreedyProjection);
        std::set<std::size_t> blocks;
        for (std::size_t j : sel.indices) blocks.insert(j % r);
        CHECK(blocks.size() == r);  // one pick per block
    }
}

TEST_CASE("greedy init is deterministic and ignores the seed") {
    std::mt19937_64 g(107);
    const SparseMatrix x = testutil::random_sparse(g, 10, 40, 0.4, 0.1, 2.0);
    const auto a = onmf::init_w(x, 4, InitMethod::GreedyProjection, 1);
    const auto b = onmf::init_w(x, 4, InitMethod::GreedyProjection, 2);
    CHECK(a.second.indices == b.second.indices);
}

TEST_CASE("greedy init never selects an all-zero column") {
    // Column 1 is all-zero; columns 0, 2, 3 are usable.
    const SparseMatrix x = SparseMatrix::from_triplets(
        3, 4, {{0, 0, 2.0}, {1, 2, 1.0}, {2, 3, 1.5}});
    const auto [w, sel] = onmf::init_w(x, 3, InitMethod::GreedyProjection);
    CHECK(std::find(sel.indices.begin(), sel.indices.end(), 1) == sel.indices.end());
    CHECK_THROWS_AS(onmf::init_w(x, 4, InitMethod::GreedyProjection),
                    std::invalid_argument);
}

TEST_CASE("provided-indices init copies the requested columns") {
    const SparseMatrix x = SparseMatrix::from_triplets(
        2, 3, {{0, 0, 1.0}, {1, 1, 2.0}, {0, 2, 3.0}});
    const std::vector<std::size_t> idx = {2, 0};
    const auto [w, sel] = onmf::init_w(x, 2, InitMethod::ProvidedIndices, 0, idx);
    CHECK(sel.indices == idx);
    CHECK(w(0, 0) == 3.0);
    CHECK(w(1, 0) == 0.0);
    CHECK(w(0, 1) == 1.0);
}

TEST_CASE("provided-indices init validation") {
    const SparseMatrix x = SparseMatrix::from_triplets(2, 3, {{0, 0, 1.0}, {1, 1, 2.0}});
    const std::vector<std::size_t> short_idx = {0};
    CHECK_THROWS_AS(onmf::init_w(x, 2, InitMethod::ProvidedIndices, 0, short_idx),
                    std::invalid_argument);
    const std::vector<std::size_t> dup = {1, 1};
    CHECK_THROWS_AS(onmf::init_w(x, 2, InitMethod::ProvidedIndices, 0, dup),
                    std::invalid_argument);
    const std::vector<std::size_t> oob = {0, 3};
    CHECK_THROWS_AS(onmf::init_w(x, 2, InitMethod::ProvidedIndices, 0, oob),
                    std::invalid_argument);
}

TEST_CASE("random init draws distinct nonzero columns, deterministically per seed") {
    std::mt19937_64 g(109);
    SparseMatrix x = testutil::random_sparse(g, 8, 30, 0.3, 0.1, 2.0);
    const auto a = onmf::init_w(x, 5, InitMethod::RandomColumns, 7);
    const auto b = onmf::init_w(x, 5, InitMethod::RandomColumns, 7);
    CHECK(a.second.indices == b.second.indices);
    std::set<std::size_t> distinct(a.second.indices.begin(), a.second.indices.end());
    CHECK(distinct.size() == 5);
    for (std::size_t j : a.second.indices) CHECK(x.column(j).size() > 0);
    // Different seeds explore different subsets eventually.
    bool differs = false;
    for (std::uint64_t s = 0; s < 16 && !differs; ++s)
        differs = onmf::init_w(x, 5, InitMethod::RandomColumns, s).second.indices !=
                  a.second.indices;
    CHECK(differs);
}

TEST_CASE("init_w rejects out-of-range ranks") {
    const SparseMatrix x = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, 1.0}});
    CHECK_THROWS_AS(onmf::init_w(x, 0, InitMethod::GreedyProjection), std::invalid_argument);
    CHECK_THROWS_AS(onmf::init_w(x, 3, InitMethod::GreedyProjection), std::invalid_argument);
}
