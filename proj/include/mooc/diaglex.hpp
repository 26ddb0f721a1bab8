#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "mooc/core_model.hpp"

namespace mooc {

// A keyword rule matches case-insensitively as a substring. A rule whose
// pattern is written `re:<expr>` is an ECMAScript regex searched
// case-insensitively. An empty pattern never matches (placeholder slot).
struct DiagnosticRule {
    std::string category;
    std::string pattern;
    std::string meaning;

    bool is_regex() const noexcept { return pattern.starts_with("re:"); }
    bool operator==(const DiagnosticRule& o) const { return category == o.category && pattern == o.pattern; }
};

/// Ordered diagnostic categories, first match wins.
///
/// Feature layout: index 0 is "None" (successful compile), indices
/// 1..kRuleCount are the rules in order, and the last index is "Other".
class DiagnosticTaxonomy {
public:
    static constexpr std::size_t kRuleCount = 21;
    static constexpr std::size_t kFeatureCount = kRuleCount + 2;
    static constexpr std::string_view kNone = "None";
    static constexpr std::string_view kOther = "Other";

    explicit DiagnosticTaxonomy(std::vector<DiagnosticRule> rules);

    const std::vector<DiagnosticRule>& rules() const noexcept { return rules_; }

    // Index of the first matching rule, or nullopt.
    std::optional<std::size_t> match(std::string_view text) const;
    // Category name of the first matching rule, or "Other".
    const std::string& classify(std::string_view text) const;
    // Feature index (1..22) of an error diagnostic.
    std::size_t feature_index(std::string_view text) const;

    // "None", rule categories..., "Other".
    std::vector<std::string> feature_names() const;
    std::size_t feature_index_of(std::string_view category) const;

private:
    std::vector<DiagnosticRule> rules_;
    std::vector<std::string> lowered_;
    std::vector<std::optional<std::regex>> regexes_;
    std::string other_ = std::string(kOther);
};

DiagnosticTaxonomy default_taxonomy();

// Meaning text for "None" in the default taxonomy.
inline constexpr std::string_view kNoneMeaning = "No errors at all";

// taxonomy.cfg: `category<TAB>keyword_or_regex[<TAB>meaning]`, one per line,
// order = priority; blank lines and lines starting with '#' are skipped.
DiagnosticTaxonomy read_taxonomy(std::istream& in, const std::string& source = "<taxonomy>");
DiagnosticTaxonomy load_taxonomy(const std::filesystem::path& path);
void write_taxonomy(std::ostream& out, const DiagnosticTaxonomy& tax);

std::string_view classify_diagnostic(std::string_view text, const DiagnosticTaxonomy& tax);

struct CompileFeatureVector {
    std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(DiagnosticTaxonomy::kFeatureCount, 0);

    std::uint64_t total() const;
    bool operator==(const CompileFeatureVector&) const = default;
};

// Keyed by student id; every cohort student appears, inactive ones as zeros.
std::map<std::string, CompileFeatureVector> extract_features(const Cohort& cohort, const DiagnosticTaxonomy& tax);

// features.csv: `student_id,none,<cat1>,...,<cat22>`.
void write_features(std::ostream& out, const std::map<std::string, CompileFeatureVector>& features,
                    const DiagnosticTaxonomy& tax);

}  // namespace mooc
