#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mooc/learn/dataset.hpp"
#include "mooc/rng.hpp"

namespace mooc::learn {

struct MlpConfig {
    std::vector<std::size_t> hidden = {32, 16, 8};
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::size_t epochs = 150;
    std::size_t batch_size = 16;
    double l2 = 1e-3;
};

struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;  // outputs x inputs, row-major
    std::vector<double> biases;
};

/// Feed-forward network: ReLU hidden layers, one logistic output giving P(Fail).
class MlpNetwork {
public:
    MlpNetwork() = default;
    // He-uniform weights for ReLU layers, Glorot-uniform for the output, zero biases.
    MlpNetwork(std::size_t inputs, std::span<const std::size_t> hidden, Rng& rng);

    std::size_t input_width() const { return layers_.empty() ? 0 : layers_.front().inputs; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    double logit(std::span<const double> row) const;
    // Clamped to [1e-12, 1 - 1e-12] so it never reaches 0 or 1.
    double probability(std::span<const double> row) const;

    // All weights and biases, layer by layer (weights before biases).
    std::size_t parameter_count() const;
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> values);

    /// Mean binary cross-entropy over the rows plus (l2 / 2) * |weights|^2.
    /// When `gradient` is non-null it receives d(loss)/d(parameters) in
    /// parameters() order.
    double loss(const Matrix& x, std::span<const double> targets, double l2, std::vector<double>* gradient) const;

private:
    std::vector<DenseLayer> layers_;
};

// Network plus the scaling fitted on its training rows.
struct MlpModel {
    Standardizer scaler;
    MlpNetwork network;
    MlpConfig config;
    std::uint64_t seed = 0;
};

// Mini-batch gradient descent with momentum; features are z-scored with the
// training rows' statistics. Throws if the epoch loss becomes non-finite.
MlpModel mlp_fit(const Dataset& train, const MlpConfig& cfg, std::uint64_t seed);

struct MlpPrediction {
    std::vector<double> probabilities;  // P(Fail)
    std::vector<Outcome> labels;        // Fail iff P(Fail) >= 0.5
};

MlpPrediction mlp_predict(const MlpModel& model, const Matrix& rows);

}  // namespace mooc::learn
