#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mooc {

using Timestamp = std::chrono::sys_seconds;

enum class CompileStatus { Ok, Error };

enum class Outcome { Pass, Fail };

struct SubmissionRecord {
    std::string student_id;
    std::string assignment_id;
    Timestamp timestamp{};
    std::int64_t submission_order = 1;
    bool plagiarism_flag = false;
    CompileStatus compile_status = CompileStatus::Ok;
    std::string diagnostic_text;

    bool operator==(const SubmissionRecord&) const = default;
};

// Assignment -> group index in [1, groups]; every index in that range is used.
class GroupingSpec {
public:
    GroupingSpec() = default;
    // Throws if indices fall outside [1, groups] or leave a group empty.
    GroupingSpec(std::map<std::string, int> assignment_groups, int groups);

    int groups() const noexcept { return groups_; }
    bool contains(const std::string& assignment_id) const { return map_.count(assignment_id) != 0; }
    int group_of(const std::string& assignment_id) const;
    const std::map<std::string, int>& assignments() const noexcept { return map_; }
    // Assignment ids of one group (1-based), sorted.
    const std::vector<std::string>& members(int group) const;

private:
    std::map<std::string, int> map_;
    std::vector<std::vector<std::string>> members_;
    int groups_ = 0;
};

using OutcomeMap = std::map<std::string, double>;

// Fail iff score < 60.
Outcome label_outcome(double score);

std::string_view to_string(Outcome o);
std::string_view to_string(CompileStatus s);

std::string format_timestamp(Timestamp t);
// Accepts `YYYY-MM-DDThh:mm:ssZ` (fractional seconds are rejected).
Timestamp parse_timestamp(std::string_view text);

std::vector<SubmissionRecord> read_submissions(std::istream& in, const std::string& source = "<submissions>");
std::vector<SubmissionRecord> load_submissions(const std::filesystem::path& path);
void write_submissions(std::ostream& out, std::span<const SubmissionRecord> records);

OutcomeMap read_outcomes(std::istream& in, const std::string& source = "<outcomes>");
OutcomeMap load_outcomes(const std::filesystem::path& path);
void write_outcomes(std::ostream& out, const OutcomeMap& outcomes);

// When `expected_groups` is positive the file must use exactly that many groups.
GroupingSpec read_grouping(std::istream& in, const std::string& source = "<grouping>", int expected_groups = 0);
GroupingSpec load_grouping(const std::filesystem::path& path, int expected_groups = 0);
void write_grouping(std::ostream& out, const GroupingSpec& grouping);

/// Cross-validated, immutable analysis unit.
///
/// Students are the union of submitters and scored students, ordered
/// lexicographically by id. Each student's submissions keep file order.
class Cohort {
public:
    const std::vector<std::string>& students() const noexcept { return students_; }
    std::size_t size() const noexcept { return students_.size(); }
    std::size_t index_of(const std::string& student_id) const;

    const std::vector<SubmissionRecord>& submissions() const noexcept { return submissions_; }
    // Indices into submissions() for the i-th student.
    const std::vector<std::size_t>& submissions_of(std::size_t student) const { return by_student_[student]; }

    double score(std::size_t student) const { return scores_[student]; }
    Outcome outcome(std::size_t student) const { return label_outcome(scores_[student]); }
    const OutcomeMap& outcomes() const noexcept { return outcomes_; }
    const GroupingSpec& grouping() const noexcept { return grouping_; }

private:
    friend Cohort assemble_cohort(std::vector<SubmissionRecord>, OutcomeMap, GroupingSpec);

    std::vector<SubmissionRecord> submissions_;
    OutcomeMap outcomes_;
    GroupingSpec grouping_;
    std::vector<std::string> students_;
    std::vector<double> scores_;
    std::vector<std::vector<std::size_t>> by_student_;
};

/// Errors: a submitter without an outcome (all such ids are listed), an
/// assignment missing from the grouping, a record violating its invariants,
/// or one student carrying two different order values for one assignment.
Cohort assemble_cohort(std::vector<SubmissionRecord> submissions, OutcomeMap outcomes, GroupingSpec grouping);

}  // namespace mooc
