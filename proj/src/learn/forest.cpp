#include "mooc/learn/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mooc/error.hpp"
#include "mooc/rng.hpp"

namespace mooc::learn {

std::vector<std::size_t> ImportanceRanking::order() const {
    std::vector<std::size_t> out;
    for (const auto& e : entries) out.push_back(e.index);
    return out;
}

double DecisionTree::predict_fail(std::span<const double> row) const {
    std::size_t at = 0;
    while (nodes[at].feature >= 0) {
        const auto& n = nodes[at];
        at = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[at].fail_fraction;
}

namespace {

double gini(double fail, double total) {
    if (total <= 0.0) return 0.0;
    const double p = fail / total;
    return 2.0 * p * (1.0 - p);
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;  // n * gini(parent) - n_l * gini(left) - n_r * gini(right)
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, const ForestConfig& cfg, std::size_t mtry, Rng& rng, double root_size)
        : data_(data), cfg_(cfg), mtry_(mtry), rng_(rng), root_size_(root_size) {
        tree_.impurity_decrease.assign(data.width(), 0.0);
    }

    DecisionTree build(std::vector<std::size_t> rows) {
        grow(rows, 0);
        return std::move(tree_);
    }

private:
    const Dataset& data_;
    const ForestConfig& cfg_;
    std::size_t mtry_;
    Rng& rng_;
    double root_size_;
    DecisionTree tree_;

    std::size_t grow(std::vector<std::size_t>& rows, std::size_t depth) {
        const std::size_t id = tree_.nodes.size();
        tree_.nodes.emplace_back();
        const double n = static_cast<double>(rows.size());
        double fails = 0.0;
        for (auto r : rows) fails += target(data_.labels[r]);
        tree_.nodes[id].fail_fraction = n > 0 ? fails / n : 0.0;

        const bool pure = fails == 0.0 || fails == n;
        if (pure || depth >= cfg_.max_depth || rows.size() < cfg_.min_samples_split) return id;

        const SplitChoice best = choose_split(rows, fails);
        if (best.feature < 0 || best.decrease <= 0.0) return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows) {
            (data_.features(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right).push_back(r);
        }
        tree_.impurity_decrease[static_cast<std::size_t>(best.feature)] += best.decrease / root_size_;
        rows.clear();
        rows.shrink_to_fit();

        const std::size_t l = grow(left, depth + 1);
        const std::size_t r = grow(right, depth + 1);
        auto& node = tree_.nodes[id];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    // Visits features in random order until mtry non-constant ones were tried.
    SplitChoice choose_split(const std::vector<std::size_t>& rows, double fails) {
        const double n = static_cast<double>(rows.size());
        const double parent = n * gini(fails, n);
        std::vector<std::size_t> features(data_.width());
        std::iota(features.begin(), features.end(), 0);
        rng_.shuffle(features);

        SplitChoice best;
        std::size_t tried = 0;
        std::vector<std::pair<double, double>> column(rows.size());  // (value, target)
        for (std::size_t f : features) {
            if (tried >= mtry_) break;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                column[i] = {data_.features(rows[i], f), target(data_.labels[rows[i]])};
            }
            std::sort(column.begin(), column.end());
            if (column.front().first == column.back().first) continue;
            ++tried;

            double left_n = 0.0, left_fail = 0.0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                left_n += 1.0;
                left_fail += column[i].second;
                if (column[i].first == column[i + 1].first) continue;
                const double right_n = n - left_n;
                const double right_fail = fails - left_fail;
                const double decrease = parent - left_n * gini(left_fail, left_n) - right_n * gini(right_fail, right_n);
                if (decrease > best.decrease + 1e-12) {
                    best.feature = static_cast<int>(f);
                    best.threshold = 0.5 * (column[i].first + column[i + 1].first);
                    best.decrease = decrease;
                }
            }
        }
        return best;
    }
};

}  // namespace

RandomForest RandomForest::fit(const Dataset& train, const ForestConfig& cfg, std::uint64_t seed) {
    train.validate();
    if (train.size() == 0) throw Error("rf_fit: empty training set");
    if (train.count(Outcome::Fail) == 0 || train.count(Outcome::Pass) == 0) {
        throw Error("rf_fit: training data contains a single class");
    }
    if (cfg.trees == 0) throw Error("rf_fit: need at least one tree");

    const std::size_t width = train.width();
    std::size_t mtry = cfg.max_features;
    if (mtry == 0) mtry = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(width))));
    mtry = std::clamp<std::size_t>(mtry, 1, std::max<std::size_t>(width, 1));

    RandomForest forest;
    forest.feature_names_ = train.feature_names;
    const std::size_t n = train.size();
    std::vector<double> oob_sum(n, 0.0);
    std::vector<std::size_t> oob_count(n, 0);

    Rng master(seed);
    for (std::size_t t = 0; t < cfg.trees; ++t) {
        Rng rng(master.fork());
        std::vector<std::size_t> sample(n);
        std::vector<char> in_bag(n, 0);
        for (auto& s : sample) {
            s = static_cast<std::size_t>(rng.below(n));
            in_bag[s] = 1;
        }
        TreeBuilder builder(train, cfg, mtry, rng, static_cast<double>(n));
        forest.trees_.push_back(builder.build(std::move(sample)));
        for (std::size_t i = 0; i < n; ++i) {
            if (in_bag[i]) continue;
            oob_sum[i] += forest.trees_.back().predict_fail(train.features.row(i));
            ++oob_count[i];
        }
    }

    std::size_t scored = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (oob_count[i] == 0) continue;
        ++scored;
        const Outcome pred = oob_sum[i] / static_cast<double>(oob_count[i]) >= 0.5 ? Outcome::Fail : Outcome::Pass;
        if (pred == train.labels[i]) ++correct;
    }
    if (scored > 0) forest.oob_accuracy_ = static_cast<double>(correct) / static_cast<double>(scored);
    return forest;
}

double RandomForest::predict_fail(std::span<const double> row) const {
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict_fail(row);
    return sum / static_cast<double>(trees_.size());
}

std::vector<Outcome> RandomForest::predict(const Matrix& x) const {
    std::vector<Outcome> out;
    out.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        out.push_back(predict_fail(x.row(r)) >= 0.5 ? Outcome::Fail : Outcome::Pass);
    }
    return out;
}

ImportanceRanking RandomForest::importance() const {
    const std::size_t width = feature_names_.size();
    std::vector<double> total(width, 0.0);
    std::size_t contributing = 0;
    for (const auto& t : trees_) {
        const double sum = std::accumulate(t.impurity_decrease.begin(), t.impurity_decrease.end(), 0.0);
        if (sum <= 0.0) continue;  // a stump that never split carries no signal
        ++contributing;
        for (std::size_t f = 0; f < width; ++f) total[f] += t.impurity_decrease[f] / sum;
    }
    if (contributing == 0) {
        std::fill(total.begin(), total.end(), 1.0);
    }
    const double norm = std::accumulate(total.begin(), total.end(), 0.0);

    ImportanceRanking ranking;
    for (std::size_t f = 0; f < width; ++f) ranking.entries.push_back({feature_names_[f], f, total[f] / norm});
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const auto& a, const auto& b) { return a.importance > b.importance; });

    const double check = std::accumulate(ranking.entries.begin(), ranking.entries.end(), 0.0,
                                         [](double acc, const auto& e) { return acc + e.importance; });
    if (std::abs(check - 1.0) > 1e-9) throw Error("rf_importance: importances do not sum to 1");
    return ranking;
}

}  // namespace mooc::learn
