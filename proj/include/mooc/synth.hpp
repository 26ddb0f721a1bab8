#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "mooc/config.hpp"
#include "mooc/core_model.hpp"
#include "mooc/diaglex.hpp"
#include "mooc/discretize.hpp"
#include "mooc/learn/dataset.hpp"
#include "mooc/patmine.hpp"

namespace mooc::synth {

struct PlantedPattern {
    Pattern pattern;
    double fail_rate = 1.0;  // probability a latent-Fail student carries it
    double pass_rate = 0.0;
};

// Per-student Poisson rates for one diagnostic category.
struct CompileSignal {
    std::string category;
    double fail_rate = 0.0;
    double pass_rate = 0.0;
};

struct SynthConfig {
    std::uint64_t seed = 1;
    std::size_t n_students = 100;
    int groups = 14;
    std::size_t assignments_per_group = 1;
    double fail_fraction = 0.4;
    double label_noise = 0.0;
    std::vector<PlantedPattern> planted;
    std::vector<CompileSignal> compile_signal;

    // Submissions per assignment of a student sitting exactly at the group mean.
    int base_submissions = 20;
    // Course size the submission ranks are drawn from.
    std::int64_t population = 1528;
    OrderThresholds order;
    std::string start = "2019-03-01T00:00:00Z";

    // Throws on out-of-range values or patterns that cannot embed in `groups`.
    void validate() const;
};

SynthConfig synth_config_from(const KeyValueConfig& kv);

struct StudentTruth {
    std::string id;
    Outcome latent = Outcome::Pass;    // class the behaviour was drawn for
    Outcome observed = Outcome::Pass;  // label after noise, as written to outcomes.csv
    double score = 0.0;
    std::vector<bool> carries;         // one flag per planted pattern
};

struct SynthCohort {
    std::vector<SubmissionRecord> submissions;
    OutcomeMap outcomes;
    GroupingSpec grouping;
    SequenceSet sequences;  // equals build_sequences(cohort()) under config.order
    std::vector<StudentTruth> truth;
    SynthConfig config;

    Cohort cohort() const { return assemble_cohort(submissions, outcomes, grouping); }
    nlohmann::json manifest() const;
};

/// Deterministic cohort with planted behaviour.
///
/// Symbol sequences are drawn first: uniform background symbols, each carrier
/// gets its planted pattern written at a uniformly chosen valid index tuple,
/// and a sequence is redrawn until it matches exactly the planted patterns it
/// carries. Raw logs are then constructed to discretize back to those symbols:
/// per-group submission counts solved so the cohort mean lands each student
/// in their times bucket, ranks drawn inside the order bucket, and
/// plagiarism flags counted into the plagiarism bucket.
SynthCohort gen_cohort(const SynthConfig& cfg, const DiagnosticTaxonomy& tax = default_taxonomy());

// submissions.csv, outcomes.csv, grouping.csv and manifest.json.
void write_cohort_files(const SynthCohort& cohort, const std::filesystem::path& dir);

// Dynamic-programming subsequence check, independent of mooc::matches.
bool oracle_match(const FeatureSequence& seq, const Pattern& p, GapPolicy policy = {});

/// Exhaustive enumeration of every pattern up to cfg.max_pattern_length with
/// direct statistics, no pruning. Limited to alphabets of at most 5 symbols,
/// lengths 1..4 and 60 students in total.
std::vector<MinedPattern> oracle_mine(std::span<const FeatureSequence> fail_seqs,
                                      std::span<const FeatureSequence> pass_seqs, const MiningConfig& cfg);

struct CompileDatasetConfig {
    std::uint64_t seed = 1;
    std::size_t n = 500;
    double fail_fraction = 0.5;
    double label_noise = 0.0;
    // (fail rate, pass rate) per feature column.
    std::vector<std::pair<double, double>> rates;
};

// Poisson feature counts per class; exactly round(n * fail_fraction) latent Fail rows.
learn::Dataset gen_compile_dataset(const CompileDatasetConfig& cfg);

}  // namespace mooc::synth
