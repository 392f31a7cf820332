#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "onmf/dense_matrix.hpp"
#include "onmf/init.hpp"
#include "onmf/labels.hpp"
#include "onmf/metrics.hpp"
#include "onmf/run_report.hpp"
#include "onmf/solver.hpp"
#include "onmf/sparse_matrix.hpp"

namespace onmf {

struct BenchDataset {
    std::string name;
    SparseMatrix x;
    std::optional<LabelVector> labels;  // enables the accuracy metric
    std::optional<DenseMatrix> w_true;  // enables the matched-MRSA metric
};

struct BenchConfig {
    SolverConfig solver;
    InitMethod init = InitMethod::GreedyProjection;

    std::string algorithm_name() const {
        return solver.divergence == Divergence::Frobenius ? "fro" : "kl";
    }
};

// Runs every (dataset, config) pair for seeds 0..repeats-1. Labels take
// precedence over W_true when both are present. A failing run is recorded
// with metric_name "error" and does not abort the batch; rows appear in
// deterministic input order.
inline std::vector<RunReport> run_experiment(std::span<const BenchDataset> datasets,
                                             std::span<const BenchConfig> configs,
                                             std::size_t repeats) {
    if (repeats < 1) throw std::invalid_argument("run_experiment: repeats must be >= 1");
    std::vector<RunReport> reports;
    reports.reserve(datasets.size() * configs.size() * repeats);
    for (const BenchDataset& d : datasets) {
        for (const BenchConfig& c : configs) {
            for (std::size_t seed = 0; seed < repeats; ++seed) {
                RunReport rr;
                rr.dataset = d.name;
                rr.algorithm = c.algorithm_name();
                rr.r = c.solver.rank;
                rr.seed = seed;
                try {
                    auto [w0, sel] = init_w(d.x, c.solver.rank, c.init, seed);
                    SolverConfig cfg = c.solver;
                    cfg.seed = seed;
                    OnmfResult res = run_onmf(d.x, w0, cfg);
                    rr.iterations = res.report.iterations;
                    rr.time_s = res.report.wall_time_s;
                    rr.objective_trace = std::move(res.report.objective_trace);
                    rr.h_change_trace = std::move(res.report.h_change_trace);
                    if (d.labels) {
                        rr.metric_name = "accuracy";
                        rr.metric_value = clustering_accuracy(*d.labels, to_labels(res.h));
                    } else if (d.w_true) {
                        rr.metric_name = "mrsa";
                        rr.metric_value = matched_mrsa(res.w, *d.w_true).value;
                    }
                } catch (const std::exception& e) {
                    rr.metric_name = "error";
                    rr.metric_value.reset();
                    rr.error = e.what();
                }
                reports.push_back(std::move(rr));
            }
        }
    }
    return reports;
}

struct BenchAggregate {
    std::string dataset;
    std::string algorithm;
    std::size_t runs = 0;
    double mean_time_s = 0.0;
    double mean_iterations = 0.0;
    std::optional<double> mean_metric;
};

// Per (dataset, algorithm) means over the successful runs, in first-seen
// order. Failed runs count toward `runs` but not toward the means.
inline std::vector<BenchAggregate> aggregate_reports(std::span<const RunReport> reports) {
    std::vector<BenchAggregate> out;
    std::vector<std::size_t> ok_runs;
    std::vector<double> metric_sum;
    std::vector<std::size_t> metric_runs;
    for (const RunReport& r : reports) {
        std::size_t g = out.size();
        for (std::size_t i = 0; i < out.size(); ++i)
            if (out[i].dataset == r.dataset && out[i].algorithm == r.algorithm) {
                g = i;
                break;
            }
        if (g == out.size()) {
            out.push_back({r.dataset, r.algorithm, 0, 0.0, 0.0, std::nullopt});
            ok_runs.push_back(0);
            metric_sum.push_back(0.0);
            metric_runs.push_back(0);
        }
        ++out[g].runs;
        if (!r.error.empty()) continue;
        ++ok_runs[g];
        out[g].mean_time_s += r.time_s;
        out[g].mean_iterations += static_cast<double>(r.iterations);
        if (r.metric_value) {
            metric_sum[g] += *r.metric_value;
            ++metric_runs[g];
        }
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        if (ok_runs[g] > 0) {
            out[g].mean_time_s /= static_cast<double>(ok_runs[g]);
            out[g].mean_iterations /= static_cast<double>(ok_runs[g]);
        }
        if (metric_runs[g] > 0)
            out[g].mean_metric = metric_sum[g] / static_cast<double>(metric_runs[g]);
    }
    return out;
}

// Average of the per-dataset mean metric for one algorithm, weighted by each
// dataset's column count. Datasets without a metric are skipped.
inline std::optional<double> weighted_average_metric(
    std::span<const BenchDataset> datasets, std::span<const RunReport> reports,
    const std::string& algorithm) {
    const std::vector<BenchAggregate> aggs = aggregate_reports(reports);
    double num = 0.0, den = 0.0;
    for (const BenchDataset& d : datasets) {
        for (const BenchAggregate& a : aggs) {
            if (a.dataset != d.name || a.algorithm != algorithm || !a.mean_metric) continue;
            const double w = static_cast<double>(d.x.cols());
            num += w * *a.mean_metric;
            den += w;
        }
    }
    if (den == 0.0) return std::nullopt;
    return num / den;
}

}  // namespace onmf
