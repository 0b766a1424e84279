#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ccmtl/linalg.hpp"

namespace ccmtl {

// Trained model as persisted by the CLI: the per-task weights plus enough
// metadata to refuse inconsistent prediction requests.
struct Model {
    std::size_t feature_dim = 0; // includes the bias column when bias_added
    std::vector<std::string> task_ids;
    bool bias_added = false;
    double lambda = 0.0;
    std::size_t k = 0;
    WeightMatrix weights; // task_ids.size() rows, feature_dim columns

    void validate() const; // throws ValidationError on inconsistency
};

// JSON document with weights at 17 significant digits (round-trip exact).
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

} // namespace ccmtl
