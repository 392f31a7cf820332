#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace onmf {

// One solver run inside a benchmark batch. Failed runs carry a nonempty
// `error` and are serialized with metric_name "error".
struct RunReport {
    std::string dataset;
    std::string algorithm;  // "fro" or "kl"
    std::size_t r = 0;
    std::uint64_t seed = 0;
    std::string metric_name;  // "accuracy", "mrsa", "error", or empty
    std::optional<double> metric_value;
    std::size_t iterations = 0;
    double time_s = 0.0;
    std::vector<double> objective_trace;
    std::vector<double> h_change_trace;
    std::string error;
};

}  // namespace onmf
