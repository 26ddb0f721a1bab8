#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mooc/core_model.hpp"
#include "mooc/error.hpp"

namespace mooc {

enum class SequenceKind { Times, Order, Plagiarism };

inline constexpr std::array<SequenceKind, 3> kAllKinds = {SequenceKind::Times, SequenceKind::Order,
                                                          SequenceKind::Plagiarism};

std::string_view to_string(SequenceKind kind);
SequenceKind parse_kind(std::string_view text);

// Symbols a kind may take, ascending.
std::span<const int> alphabet(SequenceKind kind);
bool in_alphabet(SequenceKind kind, int symbol);

struct FeatureSequence {
    SequenceKind kind = SequenceKind::Times;
    std::vector<int> symbols;

    std::size_t size() const noexcept { return symbols.size(); }
    bool operator==(const FeatureSequence&) const = default;
};

// Raised when nobody in the cohort submitted anything to a group (X_j = 0).
class DegenerateGroupError : public Error {
public:
    explicit DegenerateGroupError(int group)
        : Error("group " + std::to_string(group) + " is degenerate: no submissions from any student"),
          group_(group) {}
    int group() const noexcept { return group_; }

private:
    int group_;
};

// (x_ij - x_j) / x_j; throws DegenerateGroupError(0) when x_j is zero.
double difference_rate(double x_ij, double x_j);

inline constexpr double kZeroRateTolerance = 1e-12;

// -2 for dr <= -0.5, -1 below zero, 0 within 1e-12 of zero, 1 below 0.5, 2 from 0.5 up.
int discretize_times(double dr);

struct OrderThresholds {
    double low = 500.0;
    double high = 1000.0;
};

// 1 up to `low`, 2 up to `high`, 3 above.
int discretize_order(double avg_order, OrderThresholds thresholds = {});

// 0 -> 0, 1..2 -> 1, 3+ -> 2.
int discretize_plagiarism(long long count);

/// Raw per-(student, group) statistics behind the three sequences.
struct GroupAggregates {
    std::size_t students = 0;
    int groups = 0;
    // Row-major [student][group].
    std::vector<double> mean_submission_count;  // X_ij
    std::vector<double> mean_submission_order;
    std::vector<long long> plagiarism_sum;
    std::vector<double> cohort_mean_count;      // X_j, one per group

    double x(std::size_t student, int group) const { return mean_submission_count[student * groups + group]; }
    double order(std::size_t student, int group) const { return mean_submission_order[student * groups + group]; }
    long long plagiarism(std::size_t student, int group) const { return plagiarism_sum[student * groups + group]; }
};

// Groups are 0-based here. An assignment a student never submitted counts 0
// submissions and the worst rank (the cohort size).
GroupAggregates compute_aggregates(const Cohort& cohort);

struct StudentSequences {
    std::string student_id;
    Outcome outcome = Outcome::Pass;
    FeatureSequence times;
    FeatureSequence order;
    FeatureSequence plagiarism;

    const FeatureSequence& of(SequenceKind kind) const;
};

struct SequenceSet {
    int length = 0;
    std::vector<StudentSequences> students;

    // Sequences of one kind for one outcome group, in student order.
    std::vector<FeatureSequence> select(SequenceKind kind, Outcome outcome) const;
};

struct DiscretizeOptions {
    OrderThresholds order;
};

/// Builds the times / order / plagiarism sequences for every student.
///
/// Throws DegenerateGroupError when some group has no submissions while the
/// cohort as a whole does. A cohort with no submissions at all is encoded as
/// uniformly inactive: times -2, order bucket of the cohort size, plagiarism 0.
SequenceSet build_sequences(const Cohort& cohort, const DiscretizeOptions& options = {});

// Symbols from precomputed aggregates; build_sequences is this plus compute_aggregates.
SequenceSet sequences_from_aggregates(const Cohort& cohort, const GroupAggregates& agg,
                                      const DiscretizeOptions& options = {});

// sequences.csv: `student_id,kind,s1,...,sG`, one row per (student, kind).
void write_sequences(std::ostream& out, const SequenceSet& set);

}  // namespace mooc
