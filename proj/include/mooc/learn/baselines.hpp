#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mooc/learn/dataset.hpp"

namespace mooc::learn {

// Gaussian naive Bayes on raw features; per-class variances floored at 1e-9.
class GaussianNaiveBayes {
public:
    static GaussianNaiveBayes fit(const Dataset& train);

    // {P(Fail | row), P(Pass | row)}.
    std::array<double, 2> posterior(std::span<const double> row) const;
    std::vector<Outcome> predict(const Matrix& x) const;

    static constexpr double kVarianceFloor = 1e-9;

private:
    std::array<double, 2> log_prior_{};
    std::array<std::vector<double>, 2> mean_, var_;
};

struct LogisticConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 500;
    double l2 = 1e-3;
};

// L2-regularized logistic regression, full-batch gradient descent on z-scored features.
class LogisticRegression {
public:
    static LogisticRegression fit(const Dataset& train, const LogisticConfig& cfg);

    double probability(std::span<const double> row) const;
    std::vector<Outcome> predict(const Matrix& x) const;
    const std::vector<double>& weights() const noexcept { return weights_; }
    double bias() const noexcept { return bias_; }

private:
    Standardizer scaler_;
    std::vector<double> weights_;
    double bias_ = 0.0;
};

struct SvmConfig {
    double learning_rate = 0.05;
    std::size_t epochs = 200;
    double l2 = 1e-3;
};

// Linear SVM: stochastic sub-gradient descent on hinge loss + (l2/2)|w|^2,
// sample order reshuffled each epoch from the seed; step size decays as 1/sqrt(epoch).
class LinearSvm {
public:
    static LinearSvm fit(const Dataset& train, const SvmConfig& cfg, std::uint64_t seed);

    double decision(std::span<const double> row) const;
    std::vector<Outcome> predict(const Matrix& x) const;
    const std::vector<double>& weights() const noexcept { return weights_; }

private:
    Standardizer scaler_;
    std::vector<double> weights_;
    double bias_ = 0.0;
};

enum class BaselineKind { NaiveBayes, LogisticRegression, LinearSvm };

std::string_view to_string(BaselineKind kind);

struct BaselineConfig {
    LogisticConfig logistic;
    SvmConfig svm;
};

// Fits on `train`, predicts `test`. Throws if `train` holds a single class.
Metrics baseline_fit_predict(BaselineKind kind, const Dataset& train, const Dataset& test, std::uint64_t seed,
                             const BaselineConfig& cfg = {});

}  // namespace mooc::learn
