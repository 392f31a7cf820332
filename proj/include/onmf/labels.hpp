#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "onmf/orthogonal_h.hpp"

namespace onmf {

// Cluster index per data point.
struct LabelVector {
    std::vector<std::size_t> labels;

    std::size_t size() const { return labels.size(); }

    std::size_t class_count() const {
        if (labels.empty()) return 0;
        return *std::max_element(labels.begin(), labels.end()) + 1;
    }
};

inline LabelVector to_labels(const OrthogonalH& h) {
    LabelVector out;
    out.labels.reserve(h.column_count());
    for (std::size_t j = 0; j < h.column_count(); ++j) {
        const std::size_t k = h.assignment(j);
        out.labels.push_back(k == OrthogonalH::kUnassigned ? 0 : k);
    }
    return out;
}

}  // namespace onmf
