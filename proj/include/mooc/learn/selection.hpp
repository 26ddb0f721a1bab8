#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mooc/learn/dataset.hpp"
#include "mooc/learn/forest.hpp"
#include "mooc/learn/mlp.hpp"

namespace mooc::learn {

// Fits on `train` and returns accuracy on `test`.
using Trainer = std::function<double(const Dataset& train, const Dataset& test, std::uint64_t seed)>;

struct SelectionResult {
    std::vector<std::string> selected;
    std::vector<std::size_t> selected_indices;
    // Accuracy with the top-1, top-2, ... features, including the step that stopped the search.
    std::vector<double> trajectory;
};

// Number of features to keep for an accuracy trajectory: stops before the
// first step that is not strictly better than its predecessor.
std::size_t selected_count(std::span<const double> trajectory);

/// Grows the feature set in ranking order, one split (train_fraction, seed)
/// shared by every step, until accuracy stops strictly improving.
SelectionResult forward_select(const Dataset& data, const ImportanceRanking& ranking, const Trainer& trainer,
                               std::uint64_t seed, double train_fraction = 0.8);

// Trainer that fits an MLP and reports its test accuracy.
Trainer mlp_trainer(const MlpConfig& cfg);

}  // namespace mooc::learn
