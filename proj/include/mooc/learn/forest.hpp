#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mooc/learn/dataset.hpp"

namespace mooc::learn {

struct ForestConfig {
    std::size_t trees = 100;
    std::size_t max_depth = 8;
    std::size_t min_samples_split = 2;
    // Features tried per split; 0 means floor(sqrt(width)).
    std::size_t max_features = 0;
};

struct FeatureImportance {
    std::string name;
    std::size_t index = 0;
    double importance = 0.0;
};

// Descending by importance (ties keep column order); sums to 1.
struct ImportanceRanking {
    std::vector<FeatureImportance> entries;

    std::vector<std::size_t> order() const;
};

// CART tree over Gini impurity; leaves hold the fraction of Fail rows.
struct DecisionTree {
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        std::size_t left = 0;
        std::size_t right = 0;
        double fail_fraction = 0.0;
    };
    std::vector<Node> nodes;
    // Unnormalized impurity decrease per feature, weighted by node share.
    std::vector<double> impurity_decrease;

    double predict_fail(std::span<const double> row) const;
};

class RandomForest {
public:
    // Bootstrap sample per tree, random feature subset per split.
    // Throws when the training data holds a single class.
    static RandomForest fit(const Dataset& train, const ForestConfig& cfg, std::uint64_t seed);

    double predict_fail(std::span<const double> row) const;
    std::vector<Outcome> predict(const Matrix& x) const;

    // Mean decrease in impurity, normalized per tree, averaged and renormalized.
    ImportanceRanking importance() const;

    // Accuracy over rows with at least one out-of-bag tree; nullopt if none.
    std::optional<double> oob_accuracy() const { return oob_accuracy_; }

    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

private:
    std::vector<DecisionTree> trees_;
    std::vector<std::string> feature_names_;
    std::optional<double> oob_accuracy_;
};

inline ImportanceRanking rf_importance(const RandomForest& model) { return model.importance(); }

}  // namespace mooc::learn
