#include "mooc/learn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mooc/error.hpp"

namespace mooc::learn {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

constexpr double kProbabilityFloor = 1e-12;

}  // namespace

MlpNetwork::MlpNetwork(std::size_t inputs, std::span<const std::size_t> hidden, Rng& rng) {
    if (inputs == 0) throw Error("mlp: input width must be positive");
    std::size_t prev = inputs;
    for (std::size_t i = 0; i <= hidden.size(); ++i) {
        const bool output = i == hidden.size();
        const std::size_t width = output ? 1 : hidden[i];
        if (width == 0) throw Error("mlp: hidden widths must be positive");
        DenseLayer layer;
        layer.inputs = prev;
        layer.outputs = width;
        const double limit = output ? std::sqrt(6.0 / static_cast<double>(prev + width))
                                    : std::sqrt(6.0 / static_cast<double>(prev));
        layer.weights.resize(prev * width);
        for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
        layer.biases.assign(width, 0.0);
        layers_.push_back(std::move(layer));
        prev = width;
    }
}

double MlpNetwork::logit(std::span<const double> row) const {
    if (row.size() != input_width()) throw Error("mlp: input width mismatch");
    std::vector<double> act(row.begin(), row.end()), next;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        next.assign(layer.outputs, 0.0);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            double z = layer.biases[o];
            const double* w = &layer.weights[o * layer.inputs];
            for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * act[i];
            next[o] = (l + 1 < layers_.size()) ? std::max(0.0, z) : z;
        }
        act.swap(next);
    }
    return act[0];
}

double MlpNetwork::probability(std::span<const double> row) const {
    return std::clamp(sigmoid(logit(row)), kProbabilityFloor, 1.0 - kProbabilityFloor);
}

std::size_t MlpNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.biases.size();
    return n;
}

std::vector<double> MlpNetwork::parameters() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& l : layers_) {
        out.insert(out.end(), l.weights.begin(), l.weights.end());
        out.insert(out.end(), l.biases.begin(), l.biases.end());
    }
    return out;
}

void MlpNetwork::set_parameters(std::span<const double> values) {
    if (values.size() != parameter_count()) throw Error("mlp: parameter count mismatch");
    std::size_t at = 0;
    for (auto& l : layers_) {
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(at), l.weights.size(), l.weights.begin());
        at += l.weights.size();
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(at), l.biases.size(), l.biases.begin());
        at += l.biases.size();
    }
}

double MlpNetwork::loss(const Matrix& x, std::span<const double> targets, double l2,
                        std::vector<double>* gradient) const {
    if (x.cols() != input_width()) throw Error("mlp: input width mismatch");
    if (x.rows() != targets.size() || x.rows() == 0) throw Error("mlp: batch shape mismatch");
    const std::size_t depth = layers_.size();
    const double inv_n = 1.0 / static_cast<double>(x.rows());

    // Gradient buffers mirror parameters() layout.
    std::vector<std::vector<double>> grad_w, grad_b;
    if (gradient) {
        for (const auto& l : layers_) {
            grad_w.emplace_back(l.weights.size(), 0.0);
            grad_b.emplace_back(l.biases.size(), 0.0);
        }
    }

    double total = 0.0;
    std::vector<std::vector<double>> acts(depth + 1), pre(depth);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        acts[0].assign(row.begin(), row.end());
        for (std::size_t l = 0; l < depth; ++l) {
            const auto& layer = layers_[l];
            pre[l].assign(layer.outputs, 0.0);
            acts[l + 1].assign(layer.outputs, 0.0);
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                double z = layer.biases[o];
                const double* w = &layer.weights[o * layer.inputs];
                for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * acts[l][i];
                pre[l][o] = z;
                acts[l + 1][o] = (l + 1 < depth) ? std::max(0.0, z) : z;
            }
        }
        const double z = acts[depth][0];
        const double y = targets[r];
        total += softplus(z) - y * z;

        if (!gradient) continue;
        std::vector<double> delta = {(sigmoid(z) - y) * inv_n};
        for (std::size_t l = depth; l-- > 0;) {
            const auto& layer = layers_[l];
            std::vector<double> back(layer.inputs, 0.0);
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                grad_b[l][o] += d;
                const double* w = &layer.weights[o * layer.inputs];
                double* gw = &grad_w[l][o * layer.inputs];
                for (std::size_t i = 0; i < layer.inputs; ++i) {
                    gw[i] += d * acts[l][i];
                    back[i] += d * w[i];
                }
            }
            if (l > 0) {
                for (std::size_t i = 0; i < layer.inputs; ++i) back[i] = pre[l - 1][i] > 0.0 ? back[i] : 0.0;
            }
            delta.swap(back);
        }
    }

    double penalty = 0.0;
    for (const auto& l : layers_) {
        for (double w : l.weights) penalty += w * w;
    }
    const double value = total * inv_n + 0.5 * l2 * penalty;

    if (gradient) {
        gradient->clear();
        gradient->reserve(parameter_count());
        for (std::size_t l = 0; l < depth; ++l) {
            for (std::size_t k = 0; k < grad_w[l].size(); ++k) {
                gradient->push_back(grad_w[l][k] + l2 * layers_[l].weights[k]);
            }
            gradient->insert(gradient->end(), grad_b[l].begin(), grad_b[l].end());
        }
    }
    return value;
}

MlpModel mlp_fit(const Dataset& train, const MlpConfig& cfg, std::uint64_t seed) {
    train.validate();
    if (train.size() == 0) throw Error("mlp_fit: empty training set");
    if (cfg.batch_size == 0 || cfg.epochs == 0) throw Error("mlp_fit: epochs and batch size must be positive");
    if (!(cfg.learning_rate > 0.0)) throw Error("mlp_fit: learning rate must be positive");

    MlpModel model;
    model.config = cfg;
    model.seed = seed;
    model.scaler = Standardizer::fit(train.features);
    const Matrix x = model.scaler.transform(train.features);
    std::vector<double> y;
    for (auto o : train.labels) y.push_back(target(o));

    Rng rng(seed);
    model.network = MlpNetwork(train.width(), cfg.hidden, rng);
    std::vector<double> params = model.network.parameters();
    std::vector<double> velocity(params.size(), 0.0);
    std::vector<double> grad;
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            Matrix batch(stop - start, x.cols());
            std::vector<double> batch_y;
            for (std::size_t i = start; i < stop; ++i) {
                auto src = x.row(order[i]);
                std::copy(src.begin(), src.end(), batch.row(i - start).begin());
                batch_y.push_back(y[order[i]]);
            }
            epoch_loss += model.network.loss(batch, batch_y, cfg.l2, &grad);
            ++batches;
            for (std::size_t k = 0; k < params.size(); ++k) {
                velocity[k] = cfg.momentum * velocity[k] - cfg.learning_rate * grad[k];
                params[k] += velocity[k];
            }
            model.network.set_parameters(params);
        }
        if (!std::isfinite(epoch_loss / static_cast<double>(batches))) {
            throw Error("mlp_fit: loss became non-finite at epoch " + std::to_string(epoch));
        }
    }
    return model;
}

MlpPrediction mlp_predict(const MlpModel& model, const Matrix& rows) {
    if (rows.cols() != model.network.input_width()) {
        throw Error("mlp_predict: expected " + std::to_string(model.network.input_width()) + " columns, got " +
                    std::to_string(rows.cols()));
    }
    MlpPrediction out;
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        const auto scaled = model.scaler.transform_row(rows.row(r));
        const double p = model.network.probability(scaled);
        out.probabilities.push_back(p);
        out.labels.push_back(p >= 0.5 ? Outcome::Fail : Outcome::Pass);
    }
    return out;
}

}  // namespace mooc::learn
