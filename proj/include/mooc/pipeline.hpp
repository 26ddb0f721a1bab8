#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "mooc/config.hpp"
#include "mooc/core_model.hpp"
#include "mooc/diaglex.hpp"
#include "mooc/discretize.hpp"
#include "mooc/learn/baselines.hpp"
#include "mooc/learn/forest.hpp"
#include "mooc/learn/mlp.hpp"
#include "mooc/patmine.hpp"

namespace mooc {

struct PipelineConfig {
    std::filesystem::path submissions;
    std::filesystem::path outcomes;
    std::filesystem::path grouping;
    std::filesystem::path taxonomy;  // empty: built-in taxonomy
    int groups = 14;
    OrderThresholds order;
    MiningConfig mining;

    std::uint64_t seed = 42;
    double train_fraction = 0.8;
    learn::ForestConfig forest;
    learn::MlpConfig mlp;
    learn::BaselineConfig baselines;

    std::filesystem::path out = "out";

    void validate() const;
};

/// Keys: submissions, outcomes, grouping, taxonomy, out, groups, order.low,
/// order.high, mine.{min_recall, min_accuracy, max_length, interior, boundary},
/// learn.{seed, train_fraction}, learn.rf.{trees, max_depth, min_samples_split,
/// max_features}, learn.mlp.{hidden, learning_rate, momentum, epochs,
/// batch_size, l2}, learn.lr.{learning_rate, epochs, l2},
/// learn.svm.{learning_rate, epochs, l2}. Relative paths resolve against the
/// directory of the config file.
PipelineConfig pipeline_config_from(const KeyValueConfig& kv);

Cohort load_cohort(const PipelineConfig& cfg);
DiagnosticTaxonomy load_pipeline_taxonomy(const PipelineConfig& cfg);

struct KindPatterns {
    SequenceKind kind;
    std::vector<MinedPattern> patterns;
};

// Mines every kind, Fail against Pass. Throws if either class is empty.
std::vector<KindPatterns> mine_all(const SequenceSet& set, const MiningConfig& cfg);
void write_pattern_file(std::ostream& out, const std::vector<KindPatterns>& mined);

struct PredictionRun {
    learn::ImportanceRanking importance;
    std::map<std::string, CompileFeatureVector> features;
    nlohmann::json metrics;
};

/// Compile features -> forest importance on the training split -> forward
/// selection with the MLP on that same split -> MLP and the three baselines
/// refit on the selected features.
PredictionRun predict(const Cohort& cohort, const DiagnosticTaxonomy& tax, const PipelineConfig& cfg);
void write_importance(std::ostream& out, const learn::ImportanceRanking& ranking);

inline constexpr std::array<const char*, 5> kGradeBands = {"<60", "60-69", "70-79", "80-89", ">=90"};
std::size_t grade_band(double score);

// Most frequent order symbol; ties go to the later (higher) symbol.
int modal_order_symbol(const FeatureSequence& order);

// counts[symbol - 1][band]
using OrderGradeTable = std::array<std::array<std::size_t, kGradeBands.size()>, 3>;
OrderGradeTable order_vs_grade(const Cohort& cohort, const SequenceSet& set);
// Long format, nonzero cells only.
void write_order_vs_grade(std::ostream& out, const OrderGradeTable& table);

// Stage drivers writing into cfg.out.
void run_sequences(const PipelineConfig& cfg);
void run_mine(const PipelineConfig& cfg);
void run_predict(const PipelineConfig& cfg);
void run_report(const PipelineConfig& cfg);
void run_all(const PipelineConfig& cfg);

}  // namespace mooc
