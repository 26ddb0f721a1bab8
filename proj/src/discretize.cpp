#include "mooc/discretize.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include "mooc/csv.hpp"

namespace mooc {

namespace {

constexpr int kTimesAlphabet[] = {-2, -1, 0, 1, 2};
constexpr int kOrderAlphabet[] = {1, 2, 3};
constexpr int kPlagiarismAlphabet[] = {0, 1, 2};

}  // namespace

std::string_view to_string(SequenceKind kind) {
    switch (kind) {
        case SequenceKind::Times: return "times";
        case SequenceKind::Order: return "order";
        case SequenceKind::Plagiarism: return "plagiarism";
    }
    return "?";
}

SequenceKind parse_kind(std::string_view text) {
    for (auto k : kAllKinds) {
        if (to_string(k) == text) return k;
    }
    throw Error("unknown sequence kind '" + std::string(text) + "' (expected times, order or plagiarism)");
}

std::span<const int> alphabet(SequenceKind kind) {
    switch (kind) {
        case SequenceKind::Times: return kTimesAlphabet;
        case SequenceKind::Order: return kOrderAlphabet;
        case SequenceKind::Plagiarism: return kPlagiarismAlphabet;
    }
    return {};
}

bool in_alphabet(SequenceKind kind, int symbol) {
    for (int s : alphabet(kind)) {
        if (s == symbol) return true;
    }
    return false;
}

double difference_rate(double x_ij, double x_j) {
    if (x_j == 0.0) throw DegenerateGroupError(0);
    return (x_ij - x_j) / x_j;
}

int discretize_times(double dr) {
    if (std::abs(dr) < kZeroRateTolerance) return 0;
    if (dr <= -0.5) return -2;
    if (dr < 0.0) return -1;
    if (dr < 0.5) return 1;
    return 2;
}

int discretize_order(double avg_order, OrderThresholds thresholds) {
    if (avg_order <= thresholds.low) return 1;
    if (avg_order <= thresholds.high) return 2;
    return 3;
}

int discretize_plagiarism(long long count) {
    if (count <= 0) return 0;
    if (count <= 2) return 1;
    return 2;
}

GroupAggregates compute_aggregates(const Cohort& cohort) {
    const auto& grouping = cohort.grouping();
    const int groups = grouping.groups();
    const std::size_t n = cohort.size();

    GroupAggregates agg;
    agg.students = n;
    agg.groups = groups;
    agg.mean_submission_count.assign(n * groups, 0.0);
    agg.mean_submission_order.assign(n * groups, 0.0);
    agg.plagiarism_sum.assign(n * groups, 0);
    agg.cohort_mean_count.assign(groups, 0.0);

    const double worst_rank = static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
        // assignment -> (submission count, order)
        std::map<std::string, std::pair<long long, std::int64_t>> per_assignment;
        for (std::size_t idx : cohort.submissions_of(s)) {
            const auto& rec = cohort.submissions()[idx];
            auto& slot = per_assignment[rec.assignment_id];
            ++slot.first;
            slot.second = rec.submission_order;
            if (rec.plagiarism_flag) ++agg.plagiarism_sum[s * groups + grouping.group_of(rec.assignment_id) - 1];
        }
        for (int g = 0; g < groups; ++g) {
            const auto& members = grouping.members(g + 1);
            double count_sum = 0.0;
            double order_sum = 0.0;
            for (const auto& a : members) {
                auto it = per_assignment.find(a);
                if (it == per_assignment.end()) {
                    order_sum += worst_rank;
                } else {
                    count_sum += static_cast<double>(it->second.first);
                    order_sum += static_cast<double>(it->second.second);
                }
            }
            const double m = static_cast<double>(members.size());
            agg.mean_submission_count[s * groups + g] = count_sum / m;
            agg.mean_submission_order[s * groups + g] = order_sum / m;
        }
    }
    if (n > 0) {
        for (int g = 0; g < groups; ++g) {
            double sum = 0.0;
            for (std::size_t s = 0; s < n; ++s) sum += agg.mean_submission_count[s * groups + g];
            agg.cohort_mean_count[g] = sum / static_cast<double>(n);
        }
    }
    return agg;
}

const FeatureSequence& StudentSequences::of(SequenceKind kind) const {
    switch (kind) {
        case SequenceKind::Times: return times;
        case SequenceKind::Order: return order;
        case SequenceKind::Plagiarism: return plagiarism;
    }
    return times;
}

std::vector<FeatureSequence> SequenceSet::select(SequenceKind kind, Outcome outcome) const {
    std::vector<FeatureSequence> out;
    for (const auto& s : students) {
        if (s.outcome == outcome) out.push_back(s.of(kind));
    }
    return out;
}

SequenceSet sequences_from_aggregates(const Cohort& cohort, const GroupAggregates& agg,
                                      const DiscretizeOptions& options) {
    const int groups = agg.groups;
    const bool inactive_cohort = cohort.submissions().empty();
    if (!inactive_cohort) {
        for (int g = 0; g < groups; ++g) {
            if (agg.cohort_mean_count[g] == 0.0) throw DegenerateGroupError(g + 1);
        }
    }

    SequenceSet set;
    set.length = groups;
    set.students.reserve(agg.students);
    for (std::size_t s = 0; s < agg.students; ++s) {
        StudentSequences seq;
        seq.student_id = cohort.students()[s];
        seq.outcome = cohort.outcome(s);
        seq.times = {SequenceKind::Times, std::vector<int>(groups)};
        seq.order = {SequenceKind::Order, std::vector<int>(groups)};
        seq.plagiarism = {SequenceKind::Plagiarism, std::vector<int>(groups)};
        for (int g = 0; g < groups; ++g) {
            // A student with no activity sits at DR = -1 against any active cohort.
            const double dr = inactive_cohort ? -1.0 : difference_rate(agg.x(s, g), agg.cohort_mean_count[g]);
            seq.times.symbols[g] = discretize_times(dr);
            seq.order.symbols[g] = discretize_order(agg.order(s, g), options.order);
            seq.plagiarism.symbols[g] = discretize_plagiarism(agg.plagiarism(s, g));
        }
        set.students.push_back(std::move(seq));
    }
    return set;
}

SequenceSet build_sequences(const Cohort& cohort, const DiscretizeOptions& options) {
    return sequences_from_aggregates(cohort, compute_aggregates(cohort), options);
}

void write_sequences(std::ostream& out, const SequenceSet& set) {
    std::vector<std::string> header = {"student_id", "kind"};
    for (int g = 1; g <= set.length; ++g) header.push_back("s" + std::to_string(g));
    csv::write_row(out, header);
    for (const auto& s : set.students) {
        for (auto kind : kAllKinds) {
            std::vector<std::string> row = {s.student_id, std::string(to_string(kind))};
            for (int v : s.of(kind).symbols) row.push_back(std::to_string(v));
            csv::write_row(out, row);
        }
    }
}

}  // namespace mooc
