// Command-line front end: cluster, eval, synth, and bench subcommands over
// the onmf library. Exit codes: 0 success, 1 data/runtime failure, 2 usage.
#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "onmf/onmf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// %.10g, forced to look like a floating-point number ("1" -> "1.0") so
// downstream parsers can rely on the shape of metric values.
std::string format_metric(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    std::string s(buf);
    if (s.find_first_of(".einf") == std::string::npos) s += ".0";
    return s;
}

onmf::Divergence parse_divergence(const std::string& name) {
    return name == "kl" ? onmf::Divergence::KL : onmf::Divergence::Frobenius;
}

struct InitSpec {
    onmf::InitMethod method = onmf::InitMethod::GreedyProjection;
    std::vector<std::size_t> indices;
};

InitSpec parse_init(const std::string& text) {
    InitSpec spec;
    if (text == "greedy") {
        spec.method = onmf::InitMethod::GreedyProjection;
    } else if (text == "random") {
        spec.method = onmf::InitMethod::RandomColumns;
    } else if (text.rfind("indices:", 0) == 0) {
        spec.method = onmf::InitMethod::ProvidedIndices;
        std::string item;
        std::stringstream ss{text.substr(8)};
        while (std::getline(ss, item, ',')) {
            std::size_t v = 0;
            const char* b = item.data();
            auto [ptr, ec] = std::from_chars(b, b + item.size(), v);
            if (ec != std::errc() || ptr != b + item.size())
                throw CLI::ValidationError("--init", "bad index list: " + text);
            spec.indices.push_back(v);
        }
        if (spec.indices.empty())
            throw CLI::ValidationError("--init", "empty index list");
    } else {
        throw CLI::ValidationError(
            "--init", "expected greedy, random, or indices:i1,i2,... got " + text);
    }
    return spec;
}

struct ClusterArgs {
    std::string input, input_hsi, output_dir;
    std::size_t rank = 0;
    std::string divergence = "fro";
    std::string init = "greedy";
    std::size_t maxiter = 100;
    double delta = 1e-6;
    double epsilon = 1e-3;
    std::uint64_t seed = 0;
};

void run_cluster(const ClusterArgs& a) {
    std::optional<onmf::HsiCube> cube;
    onmf::SparseMatrix x = [&] {
        if (!a.input.empty()) return onmf::read_matrix_market(a.input);
        cube = onmf::read_hsi_cube(a.input_hsi);
        return onmf::hsi_to_matrix(*cube);
    }();

    const InitSpec init = parse_init(a.init);
    auto [w0, sel] = onmf::init_w(x, a.rank, init.method, a.seed, init.indices);

    onmf::SolverConfig cfg;
    cfg.divergence = parse_divergence(a.divergence);
    cfg.rank = a.rank;
    cfg.maxiter = a.maxiter;
    cfg.delta = a.delta;
    cfg.epsilon = a.epsilon;
    cfg.seed = a.seed;
    const onmf::OnmfResult res = onmf::run_onmf(x, w0, cfg);

    const fs::path dir = a.output_dir;
    fs::create_directories(dir);
    onmf::write_labels(dir / "assignments.txt", onmf::to_labels(res.h));
    onmf::write_matrix_market_dense(dir / "w.mtx", res.w);
    onmf::write_trace_csv(dir / "trace.csv", res.report.objective_trace,
                          res.report.h_change_trace);
    if (cube) onmf::write_cluster_map(dir / "cluster_map.ppm", res.h, cube->width,
                                      cube->height);

    std::printf("iters=%zu time_s=%.6g objective=%s converged=%d\n",
                res.report.iterations, res.report.wall_time_s,
                format_metric(res.report.objective_trace.back()).c_str(),
                res.report.converged ? 1 : 0);
}

struct EvalArgs {
    std::string pred_labels, truth_labels, w, truth_w;
};

void run_eval(const EvalArgs& a) {
    if (a.pred_labels.empty() && a.w.empty())
        throw CLI::ValidationError(
            "eval", "need --pred-labels/--truth-labels and/or --w/--truth-w");
    if (!a.pred_labels.empty()) {
        const onmf::LabelVector pred = onmf::read_labels(a.pred_labels);
        const onmf::LabelVector truth = onmf::read_labels(a.truth_labels);
        std::printf("accuracy=%s\n",
                    format_metric(onmf::clustering_accuracy(truth, pred)).c_str());
    }
    if (!a.w.empty()) {
        const onmf::DenseMatrix w_est =
            onmf::dense_from_sparse(onmf::read_matrix_market(a.w));
        const onmf::DenseMatrix w_true =
            onmf::dense_from_sparse(onmf::read_matrix_market(a.truth_w));
        const onmf::MatchedMrsa m = onmf::matched_mrsa(w_est, w_true);
        std::string perm;
        for (std::size_t i = 0; i < m.permutation.size(); ++i) {
            if (i) perm += ",";
            perm += std::to_string(m.permutation[i]);
        }
        std::printf("mrsa=%s\npermutation=%s\n", format_metric(m.value).c_str(),
                    perm.c_str());
    }
}

struct SynthArgs {
    std::string output_dir;
    std::size_t m = 50, n = 500, rank = 5;
    std::string law = "disjoint";
    std::string noise = "none";
    double sigma = 0.0;
    double scale_min = 5.0, scale_max = 15.0;
    double small_norm_factor = 0.0;  // 0 means unset
    std::uint64_t seed = 0;
};

void run_synth(const SynthArgs& a) {
    onmf::SyntheticSpec spec;
    spec.m = a.m;
    spec.n = a.n;
    spec.r = a.rank;
    spec.w_law = a.law == "dirichlet" ? onmf::WLaw::DirichletColumns
                                      : onmf::WLaw::DisjointSupport;
    if (a.noise == "poisson")
        spec.noise = onmf::NoiseKind::Poisson;
    else if (a.noise == "gaussian")
        spec.noise = onmf::NoiseKind::Gaussian;
    spec.gaussian_sigma = a.sigma;
    spec.scale_low = a.scale_min;
    spec.scale_high = a.scale_max;
    if (a.small_norm_factor > 0.0) spec.small_norm_factor = a.small_norm_factor;
    spec.seed = a.seed;

    const onmf::SyntheticData data = onmf::generate(spec);
    const fs::path dir = a.output_dir;
    fs::create_directories(dir);
    onmf::write_matrix_market(dir / "x.mtx", data.x);
    onmf::write_labels(dir / "labels.txt", data.labels);
    onmf::write_matrix_market_dense(dir / "w_true.mtx", data.w_true);
    std::printf("rows=%zu cols=%zu nnz=%zu\n", data.x.rows(), data.x.cols(),
                data.x.nnz());
}

struct BenchArgs {
    std::string manifest, output_dir;
    std::size_t repeats = 0;  // 0 means use the manifest value
};

void run_bench(const BenchArgs& a) {
    std::ifstream in(a.manifest);
    if (!in) throw std::runtime_error(a.manifest + ": cannot open");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(a.manifest + ": " + e.what());
    }
    const fs::path base = fs::path(a.manifest).parent_path();

    std::vector<onmf::BenchDataset> datasets;
    for (const json& d : doc.at("datasets")) {
        onmf::BenchDataset ds;
        ds.name = d.at("name").get<std::string>();
        if (d.contains("hsi")) {
            const onmf::HsiCube cube =
                onmf::read_hsi_cube(base / d.at("hsi").get<std::string>());
            ds.x = onmf::hsi_to_matrix(cube);
        } else {
            ds.x = onmf::read_matrix_market(base / d.at("matrix").get<std::string>());
        }
        if (d.contains("labels"))
            ds.labels = onmf::read_labels(base / d.at("labels").get<std::string>());
        if (d.contains("truth_w"))
            ds.w_true = onmf::dense_from_sparse(
                onmf::read_matrix_market(base / d.at("truth_w").get<std::string>()));
        datasets.push_back(std::move(ds));
    }

    std::vector<onmf::BenchConfig> configs;
    for (const json& c : doc.at("configs")) {
        onmf::BenchConfig bc;
        bc.solver.divergence = parse_divergence(c.at("divergence").get<std::string>());
        bc.solver.rank = c.at("rank").get<std::size_t>();
        if (c.contains("maxiter")) bc.solver.maxiter = c.at("maxiter").get<std::size_t>();
        if (c.contains("delta")) bc.solver.delta = c.at("delta").get<double>();
        if (c.contains("epsilon")) bc.solver.epsilon = c.at("epsilon").get<double>();
        if (c.contains("init")) {
            const InitSpec init = parse_init(c.at("init").get<std::string>());
            if (init.method == onmf::InitMethod::ProvidedIndices)
                throw std::runtime_error("bench: indices: init is not supported");
            bc.init = init.method;
        }
        configs.push_back(bc);
    }

    std::size_t repeats = a.repeats;
    if (repeats == 0) repeats = doc.value("repeats", std::size_t{1});

    const std::vector<onmf::RunReport> reports =
        onmf::run_experiment(datasets, configs, repeats);
    const fs::path dir = a.output_dir;
    fs::create_directories(dir);
    onmf::write_report_csv(dir / "report.csv", reports);

    for (const onmf::BenchAggregate& agg : onmf::aggregate_reports(reports)) {
        std::printf("dataset=%s algorithm=%s runs=%zu mean_iterations=%.6g "
                    "mean_time_s=%.6g mean_metric=%s\n",
                    agg.dataset.c_str(), agg.algorithm.c_str(), agg.runs,
                    agg.mean_iterations, agg.mean_time_s,
                    agg.mean_metric ? format_metric(*agg.mean_metric).c_str() : "na");
    }
    for (const char* alg : {"fro", "kl"}) {
        const std::optional<double> avg =
            onmf::weighted_average_metric(datasets, reports, alg);
        if (avg) std::printf("weighted algorithm=%s metric=%s\n", alg,
                             format_metric(*avg).c_str());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orthogonal nonnegative clustering toolkit"};
    app.require_subcommand(1);

    ClusterArgs cl;
    CLI::App* cluster = app.add_subcommand("cluster", "Factor a matrix into clusters");
    {
        CLI::Option_group* src = cluster->add_option_group("source");
        src->add_option("--input", cl.input, "MatrixMarket input");
        src->add_option("--input-hsi", cl.input_hsi, "Hyperspectral cube header input");
        src->require_option(1);
    }
    cluster->add_option("--rank", cl.rank, "Number of clusters")
        ->required()
        ->check(CLI::PositiveNumber);
    cluster->add_option("--divergence", cl.divergence, "fro or kl")
        ->check(CLI::IsMember({"fro", "kl"}));
    cluster->add_option("--init", cl.init, "greedy, random, or indices:i1,i2,...");
    cluster->add_option("--maxiter", cl.maxiter)->check(CLI::PositiveNumber);
    cluster->add_option("--delta", cl.delta, "Convergence threshold on the H change");
    cluster->add_option("--epsilon", cl.epsilon, "Log shift for the KL scores");
    cluster->add_option("--seed", cl.seed);
    cluster->add_option("--output-dir", cl.output_dir)->required();
    cluster->callback([&] { run_cluster(cl); });

    EvalArgs ev;
    CLI::App* eval = app.add_subcommand("eval", "Score predictions against ground truth");
    CLI::Option* pred = eval->add_option("--pred-labels", ev.pred_labels);
    CLI::Option* truth = eval->add_option("--truth-labels", ev.truth_labels);
    CLI::Option* west = eval->add_option("--w", ev.w);
    CLI::Option* wtrue = eval->add_option("--truth-w", ev.truth_w);
    pred->needs(truth);
    truth->needs(pred);
    west->needs(wtrue);
    wtrue->needs(west);
    eval->callback([&] { run_eval(ev); });

    SynthArgs sy;
    CLI::App* synth = app.add_subcommand("synth", "Generate a planted-cluster dataset");
    synth->add_option("--m", sy.m)->check(CLI::PositiveNumber);
    synth->add_option("--n", sy.n)->check(CLI::PositiveNumber);
    synth->add_option("--rank", sy.rank)->check(CLI::PositiveNumber);
    synth->add_option("--law", sy.law)->check(CLI::IsMember({"disjoint", "dirichlet"}));
    synth->add_option("--noise", sy.noise)
        ->check(CLI::IsMember({"none", "poisson", "gaussian"}));
    synth->add_option("--sigma", sy.sigma, "Gaussian noise level");
    synth->add_option("--scale-min", sy.scale_min);
    synth->add_option("--scale-max", sy.scale_max);
    synth->add_option("--small-norm-factor", sy.small_norm_factor,
                      "Shrink factor for the last true atom");
    synth->add_option("--seed", sy.seed);
    synth->add_option("--output-dir", sy.output_dir)->required();
    synth->callback([&] { run_synth(sy); });

    BenchArgs be;
    CLI::App* bench = app.add_subcommand("bench", "Run a manifest of datasets and solvers");
    bench->add_option("--manifest", be.manifest)->required();
    bench->add_option("--repeats", be.repeats, "Override the manifest repeat count");
    bench->add_option("--output-dir", be.output_dir)->required();
    bench->callback([&] { run_bench(be); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
