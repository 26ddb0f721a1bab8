#include "mooc/core_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "mooc/csv.hpp"
#include "mooc/error.hpp"

namespace mooc {

namespace {

constexpr std::string_view kSubmissionFields[] = {"student_id",       "assignment_id", "timestamp",
                                                  "submission_order", "plagiarism_flag", "compile_status",
                                                  "diagnostic_text"};

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

template <class T>
bool parse_exact(std::string_view text, T& out) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

void check_field_count(const csv::Row& row, std::size_t expected, const std::string& source) {
    if (row.fields.size() != expected) {
        throw ParseError(source, row.line, "<record>",
                         "expected " + std::to_string(expected) + " fields, got " + std::to_string(row.fields.size()));
    }
}

void require_token(const std::string& value, const std::string& source, std::size_t line, const char* field) {
    if (value.empty()) throw ParseError(source, line, field, "must not be empty");
}

}  // namespace

// ---------------------------------------------------------------------------
// GroupingSpec

GroupingSpec::GroupingSpec(std::map<std::string, int> assignment_groups, int groups)
    : map_(std::move(assignment_groups)), members_(groups > 0 ? groups : 0), groups_(groups) {
    if (groups < 1) throw Error("grouping: number of groups must be at least 1");
    for (const auto& [assignment, group] : map_) {
        if (group < 1 || group > groups) {
            throw Error("grouping: assignment '" + assignment + "' has group " + std::to_string(group) +
                        " outside 1.." + std::to_string(groups));
        }
        members_[group - 1].push_back(assignment);
    }
    for (int g = 0; g < groups; ++g) {
        if (members_[g].empty()) throw Error("grouping: group " + std::to_string(g + 1) + " has no assignments");
    }
}

int GroupingSpec::group_of(const std::string& assignment_id) const {
    auto it = map_.find(assignment_id);
    if (it == map_.end()) throw Error("grouping: unknown assignment '" + assignment_id + "'");
    return it->second;
}

const std::vector<std::string>& GroupingSpec::members(int group) const {
    if (group < 1 || group > groups_) throw Error("grouping: group index out of range");
    return members_[group - 1];
}

// ---------------------------------------------------------------------------
// Labels and enums

Outcome label_outcome(double score) { return score < 60.0 ? Outcome::Fail : Outcome::Pass; }

std::string_view to_string(Outcome o) { return o == Outcome::Fail ? "fail" : "pass"; }

std::string_view to_string(CompileStatus s) { return s == CompileStatus::Ok ? "ok" : "error"; }

// ---------------------------------------------------------------------------
// Timestamps

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    // YYYY-MM-DDThh:mm:ssZ
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != 't') ||
        text[13] != ':' || text[16] != ':' || (text[19] != 'Z' && text[19] != 'z')) {
        throw Error("timestamp '" + std::string(text) + "' is not YYYY-MM-DDThh:mm:ssZ");
    }
    auto number = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        if (!parse_exact(text.substr(pos, len), v)) throw Error("timestamp '" + std::string(text) + "' has a bad digit");
        return v;
    };
    const year_month_day ymd{year{number(0, 4)}, month{static_cast<unsigned>(number(5, 2))},
                             day{static_cast<unsigned>(number(8, 2))}};
    const int h = number(11, 2), m = number(14, 2), s = number(17, 2);
    if (!ymd.ok() || h > 23 || m > 59 || s > 59) throw Error("timestamp '" + std::string(text) + "' is out of range");
    return sys_days{ymd} + hours{h} + minutes{m} + seconds{s};
}

// ---------------------------------------------------------------------------
// submissions.csv

std::vector<SubmissionRecord> read_submissions(std::istream& in, const std::string& source) {
    csv::Reader reader(in, source);
    csv::expect_header(reader, {std::begin(kSubmissionFields), std::end(kSubmissionFields)});

    std::vector<SubmissionRecord> out;
    csv::Row row;
    while (reader.next(row)) {
        check_field_count(row, 7, source);
        const auto& f = row.fields;
        SubmissionRecord rec;
        rec.student_id = f[0];
        require_token(rec.student_id, source, row.line, "student_id");
        rec.assignment_id = f[1];
        require_token(rec.assignment_id, source, row.line, "assignment_id");
        try {
            rec.timestamp = parse_timestamp(f[2]);
        } catch (const Error& e) {
            throw ParseError(source, row.line, "timestamp", e.what());
        }
        if (!parse_exact(std::string_view(f[3]), rec.submission_order) || rec.submission_order < 1) {
            throw ParseError(source, row.line, "submission_order", "expected an integer >= 1, got '" + f[3] + "'");
        }
        if (f[4] == "0") {
            rec.plagiarism_flag = false;
        } else if (f[4] == "1") {
            rec.plagiarism_flag = true;
        } else {
            throw ParseError(source, row.line, "plagiarism_flag", "expected 0 or 1, got '" + f[4] + "'");
        }
        if (f[5] == "ok") {
            rec.compile_status = CompileStatus::Ok;
        } else if (f[5] == "error") {
            rec.compile_status = CompileStatus::Error;
        } else {
            throw ParseError(source, row.line, "compile_status", "expected ok or error, got '" + f[5] + "'");
        }
        rec.diagnostic_text = f[6];
        if (rec.compile_status == CompileStatus::Ok && !rec.diagnostic_text.empty()) {
            throw ParseError(source, row.line, "diagnostic_text", "must be empty when compile_status is ok");
        }
        if (rec.compile_status == CompileStatus::Error && rec.diagnostic_text.empty()) {
            throw ParseError(source, row.line, "diagnostic_text", "must not be empty when compile_status is error");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<SubmissionRecord> load_submissions(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_submissions(in, path.string());
}

void write_submissions(std::ostream& out, std::span<const SubmissionRecord> records) {
    csv::write_row(out, {std::begin(kSubmissionFields), std::end(kSubmissionFields)});
    for (const auto& r : records) {
        csv::write_row(out, {r.student_id, r.assignment_id, format_timestamp(r.timestamp),
                             std::to_string(r.submission_order), r.plagiarism_flag ? "1" : "0",
                             std::string(to_string(r.compile_status)), r.diagnostic_text});
    }
}

// ---------------------------------------------------------------------------
// outcomes.csv

OutcomeMap read_outcomes(std::istream& in, const std::string& source) {
    csv::Reader reader(in, source);
    csv::expect_header(reader, {"student_id", "final_score"});
    OutcomeMap out;
    csv::Row row;
    while (reader.next(row)) {
        check_field_count(row, 2, source);
        require_token(row.fields[0], source, row.line, "student_id");
        double score = 0;
        if (!parse_exact(std::string_view(row.fields[1]), score) || !std::isfinite(score)) {
            throw ParseError(source, row.line, "final_score", "expected a number, got '" + row.fields[1] + "'");
        }
        if (score < 0.0 || score > 100.0) {
            throw ParseError(source, row.line, "final_score", "score " + row.fields[1] + " outside [0, 100]");
        }
        if (!out.emplace(row.fields[0], score).second) {
            throw ParseError(source, row.line, "student_id", "duplicate student '" + row.fields[0] + "'");
        }
    }
    return out;
}

OutcomeMap load_outcomes(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_outcomes(in, path.string());
}

void write_outcomes(std::ostream& out, const OutcomeMap& outcomes) {
    csv::write_row(out, {"student_id", "final_score"});
    char buf[32];
    for (const auto& [id, score] : outcomes) {
        std::snprintf(buf, sizeof buf, "%.10g", score);
        csv::write_row(out, {id, buf});
    }
}

// ---------------------------------------------------------------------------
// grouping.csv

GroupingSpec read_grouping(std::istream& in, const std::string& source, int expected_groups) {
    csv::Reader reader(in, source);
    csv::expect_header(reader, {"assignment_id", "group_index"});
    std::map<std::string, int> map;
    int max_group = 0;
    csv::Row row;
    while (reader.next(row)) {
        check_field_count(row, 2, source);
        require_token(row.fields[0], source, row.line, "assignment_id");
        int group = 0;
        if (!parse_exact(std::string_view(row.fields[1]), group) || group < 1) {
            throw ParseError(source, row.line, "group_index", "expected an integer >= 1, got '" + row.fields[1] + "'");
        }
        if (!map.emplace(row.fields[0], group).second) {
            throw ParseError(source, row.line, "assignment_id", "assignment '" + row.fields[0] + "' grouped twice");
        }
        max_group = std::max(max_group, group);
    }
    if (map.empty()) throw Error(source + ": grouping has no assignments");
    if (expected_groups > 0 && max_group != expected_groups) {
        throw Error(source + ": grouping uses " + std::to_string(max_group) + " groups, configuration expects " +
                    std::to_string(expected_groups));
    }
    try {
        return GroupingSpec(std::move(map), max_group);
    } catch (const Error& e) {
        throw Error(source + ": " + e.what());
    }
}

GroupingSpec load_grouping(const std::filesystem::path& path, int expected_groups) {
    auto in = open_input(path);
    return read_grouping(in, path.string(), expected_groups);
}

void write_grouping(std::ostream& out, const GroupingSpec& grouping) {
    csv::write_row(out, {"assignment_id", "group_index"});
    for (const auto& [id, group] : grouping.assignments()) csv::write_row(out, {id, std::to_string(group)});
}

// ---------------------------------------------------------------------------
// Cohort

std::size_t Cohort::index_of(const std::string& student_id) const {
    auto it = std::lower_bound(students_.begin(), students_.end(), student_id);
    if (it == students_.end() || *it != student_id) throw Error("unknown student '" + student_id + "'");
    return static_cast<std::size_t>(it - students_.begin());
}

Cohort assemble_cohort(std::vector<SubmissionRecord> submissions, OutcomeMap outcomes, GroupingSpec grouping) {
    std::set<std::string> missing_outcome;
    std::set<std::string> ungrouped;
    std::map<std::pair<std::string, std::string>, std::int64_t> orders;
    for (const auto& r : submissions) {
        if (r.student_id.empty() || r.assignment_id.empty()) throw Error("submission with empty id");
        if (r.submission_order < 1) throw Error("submission_order must be >= 1 for student '" + r.student_id + "'");
        if (r.compile_status == CompileStatus::Ok && !r.diagnostic_text.empty()) {
            throw Error("successful compile with diagnostic text for student '" + r.student_id + "'");
        }
        if (!outcomes.count(r.student_id)) missing_outcome.insert(r.student_id);
        if (!grouping.contains(r.assignment_id)) ungrouped.insert(r.assignment_id);
        auto [it, fresh] = orders.emplace(std::pair{r.student_id, r.assignment_id}, r.submission_order);
        if (!fresh && it->second != r.submission_order) {
            throw Error("student '" + r.student_id + "' has inconsistent submission_order values for assignment '" +
                        r.assignment_id + "'");
        }
    }
    auto join = [](const std::set<std::string>& ids) {
        std::string s;
        for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
        return s;
    };
    if (!missing_outcome.empty()) throw Error("students with submissions but no outcome: " + join(missing_outcome));
    if (!ungrouped.empty()) throw Error("assignments missing from grouping: " + join(ungrouped));

    Cohort c;
    c.students_.reserve(outcomes.size());
    for (const auto& [id, score] : outcomes) {
        if (!(score >= 0.0 && score <= 100.0)) throw Error("score for '" + id + "' outside [0, 100]");
        c.students_.push_back(id);
        c.scores_.push_back(score);
    }
    c.by_student_.resize(c.students_.size());
    for (std::size_t i = 0; i < submissions.size(); ++i) {
        c.by_student_[c.index_of(submissions[i].student_id)].push_back(i);
    }
    c.submissions_ = std::move(submissions);
    c.outcomes_ = std::move(outcomes);
    c.grouping_ = std::move(grouping);
    return c;
}

}  // namespace mooc
