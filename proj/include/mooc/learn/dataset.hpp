#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mooc/core_model.hpp"
#include "mooc/diaglex.hpp"

namespace mooc::learn {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// 1.0 for Fail (the positive class throughout), 0.0 for Pass.
inline double target(Outcome o) { return o == Outcome::Fail ? 1.0 : 0.0; }

struct Dataset {
    Matrix features;
    std::vector<Outcome> labels;
    std::vector<std::string> feature_names;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t width() const noexcept { return feature_names.size(); }
    std::size_t count(Outcome o) const;

    // Throws on shape mismatch or non-finite entries.
    void validate() const;

    Dataset select_rows(std::span<const std::size_t> rows) const;
    Dataset select_columns(std::span<const std::size_t> cols) const;
};

// One row per cohort student (cohort order), columns in taxonomy feature order.
Dataset make_dataset(const Cohort& cohort, const std::map<std::string, CompileFeatureVector>& features,
                     const DiagnosticTaxonomy& tax);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified shuffle split.
///
/// The train part holds round(n * fraction) rows; each class contributes
/// floor or ceil of its own share, remainders going to the classes with the
/// largest fractional parts. Index lists come back sorted.
SplitIndices split_indices(std::span<const Outcome> labels, double train_fraction, std::uint64_t seed);

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed);

// Z-score scaling with statistics taken from the data it is fitted on.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;  // population std-dev; 1 for constant columns

    static Standardizer fit(const Matrix& x);
    Matrix transform(const Matrix& x) const;
    std::vector<double> transform_row(std::span<const double> row) const;
};

struct Metrics {
    double accuracy = 0.0;
    // Recall of the Fail class; nullopt when no row is truly Fail.
    std::optional<double> recall;
};

Metrics evaluate(std::span<const Outcome> predicted, std::span<const Outcome> truth);

}  // namespace mooc::learn
