#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"

#include "mooc/error.hpp"
#include "mooc/learn/baselines.hpp"
#include "mooc/learn/dataset.hpp"
#include "mooc/learn/forest.hpp"
#include "mooc/learn/mlp.hpp"
#include "mooc/learn/selection.hpp"
#include "mooc/rng.hpp"

using namespace mooc;
using namespace mooc::learn;

namespace {

constexpr Outcome F = Outcome::Fail;
constexpr Outcome P = Outcome::Pass;

Dataset make(const std::vector<std::vector<double>>& rows, const std::vector<Outcome>& labels) {
    Dataset d;
    const std::size_t width = rows.empty() ? 0 : rows[0].size();
    d.features = Matrix(rows.size(), width);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) d.features(r, c) = rows[r][c];
    }
    d.labels = labels;
    for (std::size_t c = 0; c < width; ++c) d.feature_names.push_back("x" + std::to_string(c));
    return d;
}

// Two well separated Gaussian clusters, balanced classes.
Dataset clusters(std::size_t n, std::uint32_t seed, std::size_t width = 2) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<std::vector<double>> rows;
    std::vector<Outcome> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const bool fail = i % 2 == 0;
        std::vector<double> row;
        for (std::size_t c = 0; c < width; ++c) row.push_back((fail ? 3.0 : -3.0) + noise(gen));
        rows.push_back(row);
        labels.push_back(fail ? F : P);
    }
    return make(rows, labels);
}

// Column `informative` decides the label; the rest is noise.
Dataset planted(std::size_t n, std::size_t width, std::size_t informative, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<Outcome> labels;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        for (std::size_t c = 0; c < width; ++c) row.push_back(z(gen));
        labels.push_back(row[informative] > 0 ? F : P);
        rows.push_back(row);
    }
    return make(rows, labels);
}

double norm(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

}  // namespace

// ---------------------------------------------------------------------------

TEST_CASE("evaluate") {
    const std::vector<Outcome> truth = {F, P, F, P};
    auto m = evaluate(truth, truth);
    CHECK(m.accuracy == 1.0);
    CHECK(*m.recall == 1.0);
    m = evaluate(std::vector<Outcome>{P, F, P, F}, truth);
    CHECK(m.accuracy == 0.0);
    CHECK(*m.recall == 0.0);
    m = evaluate(std::vector<Outcome>{F, F, P, P}, truth);
    CHECK(m.accuracy == 0.5);
    CHECK(*m.recall == 0.5);
    CHECK_FALSE(evaluate(std::vector<Outcome>{P, F}, std::vector<Outcome>{P, P}).recall.has_value());
    CHECK_THROWS(evaluate(std::vector<Outcome>{P}, truth));
    CHECK_THROWS(evaluate(std::vector<Outcome>{}, std::vector<Outcome>{}));
}

TEST_CASE("stratified split") {
    const std::vector<Outcome> ten = {F, F, F, F, F, F, P, P, P, P};
    SUBCASE("sizes") {
        const auto s = split_indices(ten, 0.8, 1);
        CHECK(s.train.size() == 8);
        CHECK(s.test.size() == 2);
    }
    SUBCASE("class counts") {
        const auto s = split_indices(ten, 0.5, 9);
        std::size_t fails = 0;
        for (auto i : s.train) fails += ten[i] == F;
        CHECK(fails == 3);
        CHECK(s.train.size() - fails == 2);
    }
    SUBCASE("determinism and partition") {
        std::mt19937 gen(2);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<Outcome> labels(4 + gen() % 60);
            for (auto& l : labels) l = gen() % 3 == 0 ? F : P;
            labels[0] = labels[1] = F;
            labels[2] = labels[3] = P;
            const double fraction = 0.1 + 0.8 * (gen() % 100) / 100.0;
            const auto a = split_indices(labels, fraction, trial);
            const auto b = split_indices(labels, fraction, trial);
            CHECK(a.train == b.train);
            CHECK(a.test == b.test);
            std::vector<std::size_t> all = a.train;
            all.insert(all.end(), a.test.begin(), a.test.end());
            std::sort(all.begin(), all.end());
            std::vector<std::size_t> expected(labels.size());
            std::iota(expected.begin(), expected.end(), 0);
            CHECK(all == expected);
            CHECK(a.train.size() == static_cast<std::size_t>(std::llround(labels.size() * fraction)));
        }
    }
    SUBCASE("errors") {
        CHECK_THROWS(split_indices(std::vector<Outcome>{F, P, P, P}, 0.5, 1));
        CHECK_THROWS(split_indices(ten, 1.0, 1));
        CHECK_THROWS(split_indices(ten, 0.0, 1));
    }
}

TEST_CASE("standardizer uses training statistics only") {
    const auto train = make({{1, 10}, {3, 10}}, {F, P});
    const auto s = Standardizer::fit(train.features);
    CHECK(s.mean == std::vector<double>{2, 10});
    CHECK(s.scale == std::vector<double>{1, 1});  // constant column keeps scale 1
    CHECK(s.transform_row(std::vector<double>{5, 12}) == std::vector<double>{3, 2});
}

TEST_CASE("dataset checks") {
    auto d = make({{1, 2}, {3, 4}}, {F, P});
    CHECK_NOTHROW(d.validate());
    d.features(0, 1) = std::nan("");
    CHECK_THROWS(d.validate());
    const auto cols = make({{1, 2, 3}, {4, 5, 6}}, {F, P}).select_columns(std::vector<std::size_t>{2, 0});
    CHECK(cols.feature_names == std::vector<std::string>{"x2", "x0"});
    CHECK(cols.features(1, 0) == 6);
}

// ---------------------------------------------------------------------------

TEST_CASE("random forest") {
    SUBCASE("single predictive binary feature") {
        std::vector<std::vector<double>> rows;
        std::vector<Outcome> labels;
        for (int i = 0; i < 40; ++i) {
            rows.push_back({static_cast<double>(i % 2), static_cast<double>((i * 7) % 5)});
            labels.push_back(i % 2 ? F : P);
        }
        const auto d = make(rows, labels);
        ForestConfig cfg;
        cfg.trees = 30;
        const auto rf = RandomForest::fit(d, cfg, 3);
        CHECK(evaluate(rf.predict(d.features), d.labels).accuracy == 1.0);
        CHECK(rf.importance().entries.front().name == "x0");
    }
    SUBCASE("determinism and out-of-bag accuracy") {
        const auto d = planted(300, 6, 2, 5);
        ForestConfig cfg;
        const auto a = RandomForest::fit(d, cfg, 17);
        const auto b = RandomForest::fit(d, cfg, 17);
        for (std::size_t r = 0; r < d.size(); ++r) CHECK(a.predict_fail(d.features.row(r)) == b.predict_fail(d.features.row(r)));
        REQUIRE(a.oob_accuracy().has_value());
        CHECK(*a.oob_accuracy() >= 0.9);
    }
    SUBCASE("single class is rejected") {
        CHECK_THROWS(RandomForest::fit(make({{1}, {2}}, {F, F}), {}, 1));
    }
}

TEST_CASE("importance ranking") {
    for (std::uint32_t seed = 0; seed < 5; ++seed) {
        const auto d = planted(200, 8, seed % 8, seed);
        const auto ranking = rf_importance(RandomForest::fit(d, {}, seed));
        CHECK(ranking.entries.front().index == seed % 8);
        double sum = 0.0;
        for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
            sum += ranking.entries[i].importance;
            CHECK(ranking.entries[i].importance >= 0.0);
            if (i > 0) CHECK(ranking.entries[i].importance <= ranking.entries[i - 1].importance);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("importance under a null label stays near uniform") {
    const std::size_t width = 5;
    const double uniform = 1.0 / width;
    for (std::uint32_t seed = 0; seed < 20; ++seed) {
        auto d = planted(200, width, 0, 100 + seed);
        std::mt19937 gen(seed);
        for (auto& l : d.labels) l = gen() % 2 ? F : P;
        ForestConfig cfg;
        cfg.trees = 50;
        for (const auto& e : rf_importance(RandomForest::fit(d, cfg, seed)).entries) {
            CHECK(e.importance <= 3.0 * uniform);
        }
    }
}

// ---------------------------------------------------------------------------

TEST_CASE("forward selection stop rule") {
    const auto d = planted(40, 4, 0, 1);
    ImportanceRanking ranking;
    for (std::size_t f = 0; f < 4; ++f) ranking.entries.push_back({d.feature_names[f], f, 0.25});

    auto scripted = [](std::vector<double> script) {
        return [script](const Dataset& train, const Dataset&, std::uint64_t) { return script[train.width() - 1]; };
    };
    auto r = forward_select(d, ranking, scripted({0.60, 0.66, 0.66, 0.9}), 1);
    CHECK(r.trajectory == std::vector<double>{0.60, 0.66, 0.66});
    CHECK(r.selected == std::vector<std::string>{"x0", "x1"});

    r = forward_select(d, ranking, scripted({0.5, 0.6, 0.7, 0.8}), 1);
    CHECK(r.trajectory.size() == 4);
    CHECK(r.selected.size() == 4);

    r = forward_select(d, ranking, scripted({0.7, 0.6, 0.9, 0.95}), 1);
    CHECK(r.selected == std::vector<std::string>{"x0"});

    CHECK(selected_count(std::vector<double>{0.60, 0.66, 0.66}) == 2);
    CHECK(selected_count(std::vector<double>{}) == 0);

    ImportanceRanking partial;
    partial.entries.push_back({"x0", 0, 1.0});
    CHECK_THROWS(forward_select(d, partial, scripted({1.0}), 1));
}

TEST_CASE("forward selection keeps the informative features") {
    for (std::uint32_t seed = 0; seed < 10; ++seed) {
        std::mt19937 gen(seed);
        std::normal_distribution<double> z(0.0, 1.0);
        std::vector<std::vector<double>> rows;
        std::vector<Outcome> labels;
        for (int i = 0; i < 300; ++i) {
            std::vector<double> row;
            for (int c = 0; c < 10; ++c) row.push_back(z(gen));
            labels.push_back(row[3] + row[7] > 0 ? F : P);
            rows.push_back(row);
        }
        const auto d = make(rows, labels);
        const auto [train, test] = split(d, 0.8, seed);
        const auto ranking = rf_importance(RandomForest::fit(train, {}, seed));
        const auto r = forward_select(d, ranking, mlp_trainer({}), seed);
        const auto again = forward_select(d, ranking, mlp_trainer({}), seed);
        CHECK(r.trajectory == again.trajectory);

        std::size_t noise = 0;
        for (auto idx : r.selected_indices) noise += (idx != 3 && idx != 7);
        CAPTURE(seed);
        CHECK(noise <= 1);
    }
}

// ---------------------------------------------------------------------------

TEST_CASE("MLP gradients match central differences") {
    Rng rng(12);
    for (int probe = 0; probe < 10; ++probe) {
        const std::size_t hidden[] = {32, 16, 8};
        MlpNetwork net(4, hidden, rng);
        auto params = net.parameters();
        for (auto& p : params) p += 0.1 * rng.normal();
        net.set_parameters(params);

        Matrix x(5, 4);
        std::vector<double> y(5);
        for (std::size_t r = 0; r < 5; ++r) {
            for (std::size_t c = 0; c < 4; ++c) x(r, c) = rng.normal();
            y[r] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
        std::vector<double> analytic;
        net.loss(x, y, 1e-3, &analytic);

        std::vector<double> numeric(params.size());
        const double h = 1e-6;
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto shifted = params;
            shifted[i] = params[i] + h;
            net.set_parameters(shifted);
            const double up = net.loss(x, y, 1e-3, nullptr);
            shifted[i] = params[i] - h;
            net.set_parameters(shifted);
            const double down = net.loss(x, y, 1e-3, nullptr);
            numeric[i] = (up - down) / (2 * h);
        }
        net.set_parameters(params);
        std::vector<double> diff(params.size());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = analytic[i] - numeric[i];
        CHECK(norm(diff) / (norm(analytic) + norm(numeric)) < 1e-4);
    }
}

TEST_CASE("MLP behaviour") {
    SUBCASE("zero parameters give one half") {
        Rng rng(1);
        const std::size_t hidden[] = {32, 16, 8};
        MlpNetwork net(3, hidden, rng);
        net.set_parameters(std::vector<double>(net.parameter_count(), 0.0));
        CHECK(net.probability(std::vector<double>{1, -2, 3}) == 0.5);
        CHECK_THROWS(net.set_parameters(std::vector<double>(3, 0.0)));
    }
    SUBCASE("separable data") {
        const auto d = clusters(200, 3);
        const auto [train, test] = split(d, 0.8, 4);
        const auto model = mlp_fit(train, {}, 4);
        const auto pred = mlp_predict(model, test.features);
        CHECK(evaluate(pred.labels, test.labels).accuracy == 1.0);

        const auto again = mlp_predict(mlp_fit(train, {}, 4), test.features);
        CHECK(again.probabilities == pred.probabilities);
    }
    SUBCASE("probabilities stay inside (0, 1) and agree with labels") {
        const auto d = planted(100, 3, 1, 9);
        const auto model = mlp_fit(d, {}, 2);
        std::mt19937 gen(6);
        std::normal_distribution<double> wide(0.0, 50.0);
        Matrix x(10000, 3);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < 3; ++c) x(r, c) = wide(gen);
        }
        const auto pred = mlp_predict(model, x);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            CHECK(pred.probabilities[r] > 0.0);
            CHECK(pred.probabilities[r] < 1.0);
            CHECK((pred.labels[r] == F) == (pred.probabilities[r] >= 0.5));
        }
        CHECK_THROWS(mlp_predict(model, Matrix(2, 4)));
    }
    SUBCASE("divergent training is reported") {
        MlpConfig cfg;
        cfg.learning_rate = 1e150;
        cfg.momentum = 0.0;
        CHECK_THROWS_WITH(mlp_fit(planted(60, 3, 0, 1), cfg, 1), doctest::Contains("epoch"));
    }
}

// ---------------------------------------------------------------------------

TEST_CASE("baselines") {
    const auto d = clusters(200, 8, 3);
    const auto [train, test] = split(d, 0.8, 2);
    for (auto kind : {BaselineKind::NaiveBayes, BaselineKind::LogisticRegression, BaselineKind::LinearSvm}) {
        CAPTURE(to_string(kind));
        CHECK(baseline_fit_predict(kind, train, test, 5, {}).accuracy == 1.0);
        CHECK_THROWS(baseline_fit_predict(kind, make({{1}, {2}}, {P, P}), test, 5, {}));
    }

    const auto nb = GaussianNaiveBayes::fit(planted(100, 4, 0, 3));
    std::mt19937 gen(1);
    std::normal_distribution<double> z(0.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const auto post = nb.posterior(std::vector<double>{z(gen), z(gen), z(gen), z(gen)});
        CHECK(std::abs(post[0] + post[1] - 1.0) <= 1e-9);
    }

    const auto noisy = planted(200, 4, 0, 21);
    double previous = std::numeric_limits<double>::infinity();
    for (double l2 : {0.001, 0.1, 1.0}) {
        LogisticConfig cfg;
        cfg.l2 = l2;
        const double n = norm(LogisticRegression::fit(noisy, cfg).weights());
        CHECK(n < previous);
        previous = n;
    }

    CHECK(to_string(BaselineKind::NaiveBayes) == "naive_bayes");
    CHECK(to_string(BaselineKind::LogisticRegression) == "logistic_regression");
    CHECK(to_string(BaselineKind::LinearSvm) == "linear_svm");
}
