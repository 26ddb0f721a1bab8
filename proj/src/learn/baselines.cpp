#include "mooc/learn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mooc/error.hpp"
#include "mooc/rng.hpp"

namespace mooc::learn {

namespace {

void require_two_classes(const Dataset& train, const char* who) {
    train.validate();
    if (train.count(Outcome::Fail) == 0 || train.count(Outcome::Pass) == 0) {
        throw Error(std::string(who) + ": training data contains a single class");
    }
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

// ---------------------------------------------------------------------------

GaussianNaiveBayes GaussianNaiveBayes::fit(const Dataset& train) {
    require_two_classes(train, "naive_bayes");
    GaussianNaiveBayes nb;
    const std::size_t width = train.width();
    for (int c = 0; c < 2; ++c) {
        const Outcome cls = c == 0 ? Outcome::Fail : Outcome::Pass;
        const double n = static_cast<double>(train.count(cls));
        nb.log_prior_[c] = std::log(n / static_cast<double>(train.size()));
        nb.mean_[c].assign(width, 0.0);
        nb.var_[c].assign(width, 0.0);
        for (std::size_t r = 0; r < train.size(); ++r) {
            if (train.labels[r] != cls) continue;
            for (std::size_t f = 0; f < width; ++f) nb.mean_[c][f] += train.features(r, f) / n;
        }
        for (std::size_t r = 0; r < train.size(); ++r) {
            if (train.labels[r] != cls) continue;
            for (std::size_t f = 0; f < width; ++f) {
                const double d = train.features(r, f) - nb.mean_[c][f];
                nb.var_[c][f] += d * d / n;
            }
        }
        for (auto& v : nb.var_[c]) v = std::max(v, kVarianceFloor);
    }
    return nb;
}

std::array<double, 2> GaussianNaiveBayes::posterior(std::span<const double> row) const {
    if (row.size() != mean_[0].size()) throw Error("naive_bayes: input width mismatch");
    std::array<double, 2> log_joint{};
    for (int c = 0; c < 2; ++c) {
        double lj = log_prior_[c];
        for (std::size_t f = 0; f < row.size(); ++f) {
            const double d = row[f] - mean_[c][f];
            lj -= 0.5 * std::log(2.0 * std::numbers::pi * var_[c][f]) + d * d / (2.0 * var_[c][f]);
        }
        log_joint[c] = lj;
    }
    const double m = std::max(log_joint[0], log_joint[1]);
    const double e0 = std::exp(log_joint[0] - m), e1 = std::exp(log_joint[1] - m);
    return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

std::vector<Outcome> GaussianNaiveBayes::predict(const Matrix& x) const {
    std::vector<Outcome> out;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto p = posterior(x.row(r));
        out.push_back(p[0] >= p[1] ? Outcome::Fail : Outcome::Pass);
    }
    return out;
}

// ---------------------------------------------------------------------------

LogisticRegression LogisticRegression::fit(const Dataset& train, const LogisticConfig& cfg) {
    require_two_classes(train, "logistic_regression");
    LogisticRegression lr;
    lr.scaler_ = Standardizer::fit(train.features);
    const Matrix x = lr.scaler_.transform(train.features);
    const std::size_t n = train.size(), width = train.width();
    lr.weights_.assign(width, 0.0);
    std::vector<double> grad(width);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double err = sigmoid(dot(lr.weights_, x.row(r)) + lr.bias_) - target(train.labels[r]);
            for (std::size_t f = 0; f < width; ++f) grad[f] += err * x(r, f);
            grad_b += err;
        }
        for (std::size_t f = 0; f < width; ++f) {
            lr.weights_[f] -= cfg.learning_rate * (grad[f] / static_cast<double>(n) + cfg.l2 * lr.weights_[f]);
        }
        lr.bias_ -= cfg.learning_rate * grad_b / static_cast<double>(n);
    }
    return lr;
}

double LogisticRegression::probability(std::span<const double> row) const {
    const auto scaled = scaler_.transform_row(row);
    return sigmoid(dot(weights_, scaled) + bias_);
}

std::vector<Outcome> LogisticRegression::predict(const Matrix& x) const {
    std::vector<Outcome> out;
    for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(probability(x.row(r)) >= 0.5 ? Outcome::Fail : Outcome::Pass);
    return out;
}

// ---------------------------------------------------------------------------

LinearSvm LinearSvm::fit(const Dataset& train, const SvmConfig& cfg, std::uint64_t seed) {
    require_two_classes(train, "linear_svm");
    LinearSvm svm;
    svm.scaler_ = Standardizer::fit(train.features);
    const Matrix x = svm.scaler_.transform(train.features);
    const std::size_t n = train.size(), width = train.width();
    svm.weights_.assign(width, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        const double eta = cfg.learning_rate / std::sqrt(static_cast<double>(epoch + 1));
        for (std::size_t r : order) {
            const double y = train.labels[r] == Outcome::Fail ? 1.0 : -1.0;
            const double margin = y * (dot(svm.weights_, x.row(r)) + svm.bias_);
            for (std::size_t f = 0; f < width; ++f) {
                double g = cfg.l2 * svm.weights_[f];
                if (margin < 1.0) g -= y * x(r, f);
                svm.weights_[f] -= eta * g;
            }
            if (margin < 1.0) svm.bias_ += eta * y;
        }
    }
    return svm;
}

double LinearSvm::decision(std::span<const double> row) const {
    const auto scaled = scaler_.transform_row(row);
    return dot(weights_, scaled) + bias_;
}

std::vector<Outcome> LinearSvm::predict(const Matrix& x) const {
    std::vector<Outcome> out;
    for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(decision(x.row(r)) >= 0.0 ? Outcome::Fail : Outcome::Pass);
    return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::NaiveBayes: return "naive_bayes";
        case BaselineKind::LogisticRegression: return "logistic_regression";
        case BaselineKind::LinearSvm: return "linear_svm";
    }
    return "?";
}

Metrics baseline_fit_predict(BaselineKind kind, const Dataset& train, const Dataset& test, std::uint64_t seed,
                             const BaselineConfig& cfg) {
    std::vector<Outcome> predicted;
    switch (kind) {
        case BaselineKind::NaiveBayes: predicted = GaussianNaiveBayes::fit(train).predict(test.features); break;
        case BaselineKind::LogisticRegression:
            predicted = LogisticRegression::fit(train, cfg.logistic).predict(test.features);
            break;
        case BaselineKind::LinearSvm: predicted = LinearSvm::fit(train, cfg.svm, seed).predict(test.features); break;
    }
    return evaluate(predicted, test.labels);
}

}  // namespace mooc::learn
