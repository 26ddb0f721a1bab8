#include "mooc/learn/selection.hpp"

#include "mooc/error.hpp"

namespace mooc::learn {

std::size_t selected_count(std::span<const double> trajectory) {
    if (trajectory.empty()) return 0;
    std::size_t k = 1;
    while (k < trajectory.size() && trajectory[k] > trajectory[k - 1]) ++k;
    return k;
}

SelectionResult forward_select(const Dataset& data, const ImportanceRanking& ranking, const Trainer& trainer,
                               std::uint64_t seed, double train_fraction) {
    const auto order = ranking.order();
    if (order.size() != data.width()) throw Error("forward_select: ranking does not cover the dataset features");
    const auto [train, test] = split(data, train_fraction, seed);

    SelectionResult result;
    std::vector<std::size_t> columns;
    for (std::size_t k = 0; k < order.size(); ++k) {
        columns.push_back(order[k]);
        const double acc = trainer(train.select_columns(columns), test.select_columns(columns), seed);
        result.trajectory.push_back(acc);
        if (k > 0 && !(acc > result.trajectory[k - 1])) break;
    }
    const std::size_t keep = selected_count(result.trajectory);
    for (std::size_t k = 0; k < keep; ++k) {
        result.selected_indices.push_back(order[k]);
        result.selected.push_back(data.feature_names[order[k]]);
    }
    return result;
}

Trainer mlp_trainer(const MlpConfig& cfg) {
    return [cfg](const Dataset& train, const Dataset& test, std::uint64_t seed) {
        const auto model = mlp_fit(train, cfg, seed);
        return evaluate(mlp_predict(model, test.features).labels, test.labels).accuracy;
    };
}

}  // namespace mooc::learn
