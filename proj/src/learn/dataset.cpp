#include "mooc/learn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mooc/error.hpp"
#include "mooc/rng.hpp"

namespace mooc::learn {

std::size_t Dataset::count(Outcome o) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), o));
}

void Dataset::validate() const {
    if (features.rows() != labels.size()) throw Error("dataset: row count does not match label count");
    if (features.cols() != feature_names.size()) throw Error("dataset: column count does not match feature names");
    for (double v : features.data()) {
        if (!std::isfinite(v)) throw Error("dataset: non-finite feature value");
    }
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.features = Matrix(rows.size(), width());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto src = features.row(rows[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels.push_back(labels[rows[i]]);
    }
    return out;
}

Dataset Dataset::select_columns(std::span<const std::size_t> cols) const {
    Dataset out;
    out.labels = labels;
    out.features = Matrix(size(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c] >= width()) throw Error("dataset: column index out of range");
        out.feature_names.push_back(feature_names[cols[c]]);
        for (std::size_t r = 0; r < size(); ++r) out.features(r, c) = features(r, cols[c]);
    }
    return out;
}

Dataset make_dataset(const Cohort& cohort, const std::map<std::string, CompileFeatureVector>& features,
                     const DiagnosticTaxonomy& tax) {
    Dataset d;
    d.feature_names = tax.feature_names();
    d.features = Matrix(cohort.size(), d.feature_names.size());
    for (std::size_t s = 0; s < cohort.size(); ++s) {
        auto it = features.find(cohort.students()[s]);
        if (it == features.end()) throw Error("no compile features for student '" + cohort.students()[s] + "'");
        for (std::size_t f = 0; f < it->second.counts.size(); ++f) {
            d.features(s, f) = static_cast<double>(it->second.counts[f]);
        }
        d.labels.push_back(cohort.outcome(s));
    }
    return d;
}

SplitIndices split_indices(std::span<const Outcome> labels, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error("split: train fraction must be in (0, 1)");
    if (labels.empty()) throw Error("split: empty dataset");

    std::vector<std::size_t> by_class[2];  // 0 = Fail, 1 = Pass
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == Outcome::Fail ? 0 : 1].push_back(i);
    for (int c = 0; c < 2; ++c) {
        if (by_class[c].size() < 2) {
            throw Error(std::string("split: class ") + (c == 0 ? "Fail" : "Pass") + " has fewer than 2 members");
        }
    }

    const auto n = static_cast<double>(labels.size());
    const auto total = static_cast<std::size_t>(std::llround(n * train_fraction));
    std::size_t quota[2];
    double remainder[2];
    for (int c = 0; c < 2; ++c) {
        const double exact = static_cast<double>(by_class[c].size()) * train_fraction;
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        remainder[c] = exact - std::floor(exact);
    }
    std::size_t assigned = quota[0] + quota[1];
    // At most two leftovers; the larger fractional part goes first, Fail on ties.
    const int order[2] = {remainder[1] > remainder[0] ? 1 : 0, remainder[1] > remainder[0] ? 0 : 1};
    for (int k = 0; k < 2 && assigned < total; ++k) {
        const int c = order[k];
        if (quota[c] < by_class[c].size()) {
            ++quota[c];
            ++assigned;
        }
    }

    Rng rng(seed);
    SplitIndices out;
    for (int c = 0; c < 2; ++c) {
        auto idx = by_class[c];
        rng.shuffle(idx);
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]));
        out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed) {
    data.validate();
    const auto idx = split_indices(data.labels, train_fraction, seed);
    return {data.select_rows(idx.train), data.select_rows(idx.test)};
}

Standardizer Standardizer::fit(const Matrix& x) {
    Standardizer s;
    s.mean.assign(x.cols(), 0.0);
    s.scale.assign(x.cols(), 1.0);
    if (x.rows() == 0) return s;
    const auto n = static_cast<double>(x.rows());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) sum += x(r, c);
        const double mu = sum / n;
        double ss = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) ss += (x(r, c) - mu) * (x(r, c) - mu);
        const double sd = std::sqrt(ss / n);
        s.mean[c] = mu;
        s.scale[c] = sd > 1e-12 ? sd : 1.0;
    }
    return s;
}

Matrix Standardizer::transform(const Matrix& x) const {
    if (x.cols() != mean.size()) throw Error("standardizer: column count mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean[c]) / scale[c];
    }
    return out;
}

std::vector<double> Standardizer::transform_row(std::span<const double> row) const {
    if (row.size() != mean.size()) throw Error("standardizer: column count mismatch");
    std::vector<double> out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) out[c] = (row[c] - mean[c]) / scale[c];
    return out;
}

Metrics evaluate(std::span<const Outcome> predicted, std::span<const Outcome> truth) {
    if (predicted.size() != truth.size()) throw Error("evaluate: prediction and label counts differ");
    if (truth.empty()) throw Error("evaluate: no rows");
    std::size_t correct = 0, fails = 0, caught = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] == truth[i]) ++correct;
        if (truth[i] == Outcome::Fail) {
            ++fails;
            if (predicted[i] == Outcome::Fail) ++caught;
        }
    }
    Metrics m;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    if (fails > 0) m.recall = static_cast<double>(caught) / static_cast<double>(fails);
    return m;
}

}  // namespace mooc::learn
