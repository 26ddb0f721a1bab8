#include "mooc/diaglex.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "mooc/csv.hpp"
#include "mooc/error.hpp"

namespace mooc {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

DiagnosticTaxonomy::DiagnosticTaxonomy(std::vector<DiagnosticRule> rules) : rules_(std::move(rules)) {
    if (rules_.size() != kRuleCount) {
        throw Error("taxonomy must have exactly " + std::to_string(kRuleCount) + " rules, got " +
                    std::to_string(rules_.size()));
    }
    std::set<std::string> names = {std::string(kNone), std::string(kOther)};
    for (const auto& r : rules_) {
        if (r.category.empty()) throw Error("taxonomy rule with empty category name");
        if (!names.insert(r.category).second) throw Error("duplicate taxonomy category '" + r.category + "'");
        lowered_.push_back(lower(r.pattern));
        if (r.is_regex()) {
            try {
                regexes_.emplace_back(std::regex(r.pattern.substr(3), std::regex::ECMAScript | std::regex::icase));
            } catch (const std::regex_error& e) {
                throw Error("taxonomy category '" + r.category + "': bad regex: " + e.what());
            }
        } else {
            regexes_.emplace_back(std::nullopt);
        }
    }
}

std::optional<std::size_t> DiagnosticTaxonomy::match(std::string_view text) const {
    const std::string haystack = lower(text);
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (regexes_[i]) {
            if (std::regex_search(haystack.begin(), haystack.end(), *regexes_[i])) return i;
        } else if (!lowered_[i].empty() && haystack.find(lowered_[i]) != std::string::npos) {
            return i;
        }
    }
    return std::nullopt;
}

const std::string& DiagnosticTaxonomy::classify(std::string_view text) const {
    auto hit = match(text);
    return hit ? rules_[*hit].category : other_;
}

std::size_t DiagnosticTaxonomy::feature_index(std::string_view text) const {
    auto hit = match(text);
    return hit ? *hit + 1 : kFeatureCount - 1;
}

std::vector<std::string> DiagnosticTaxonomy::feature_names() const {
    std::vector<std::string> names = {std::string(kNone)};
    for (const auto& r : rules_) names.push_back(r.category);
    names.emplace_back(kOther);
    return names;
}

std::size_t DiagnosticTaxonomy::feature_index_of(std::string_view category) const {
    const auto names = feature_names();
    auto it = std::find(names.begin(), names.end(), category);
    if (it == names.end()) throw Error("unknown diagnostic category '" + std::string(category) + "'");
    return static_cast<std::size_t>(it - names.begin());
}

DiagnosticTaxonomy default_taxonomy() {
    std::vector<DiagnosticRule> rules = {
        {"Syntax error", "syntax error", "Illegal statement in code"},
        {"Redefinition of main", "redefinition of 'main'", "Main function repeatedly defined"},
        {"Undeclared", "undeclared", "The variable is not declared"},
        {"Invalid value", "invalid value", "Wrong data type or data size"},
        {"Stray", "stray", "Additional symbols appears"},
        {"Invalid operands", "invalid operands", "Invalid operands to binary"},
        {"Not a function", "not a function", "No correlation function defined"},
        {"Conflicting", "conflicting", "Inconsistent declaration of function"},
        {"Not use struct", "invalid use of 'struct'", "Invalid use of 'struct data'"},
    };
    // Slots 10..21 are left for site-specific compiler messages.
    for (int i = 10; i <= 21; ++i) {
        rules.push_back({"Placeholder " + std::to_string(i), "", "Unassigned category (configure in taxonomy.cfg)"});
    }
    return DiagnosticTaxonomy(std::move(rules));
}

DiagnosticTaxonomy read_taxonomy(std::istream& in, const std::string& source) {
    std::vector<DiagnosticRule> rules;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(source, number, "<rule>", "expected category<TAB>pattern");
        DiagnosticRule rule;
        rule.category = line.substr(0, tab);
        std::string rest = line.substr(tab + 1);
        if (auto tab2 = rest.find('\t'); tab2 != std::string::npos) {
            rule.meaning = rest.substr(tab2 + 1);
            rest.erase(tab2);
        }
        rule.pattern = std::move(rest);
        rules.push_back(std::move(rule));
    }
    try {
        return DiagnosticTaxonomy(std::move(rules));
    } catch (const Error& e) {
        throw Error(source + ": " + e.what());
    }
}

DiagnosticTaxonomy load_taxonomy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_taxonomy(in, path.string());
}

void write_taxonomy(std::ostream& out, const DiagnosticTaxonomy& tax) {
    for (const auto& r : tax.rules()) {
        out << r.category << '\t' << r.pattern;
        if (!r.meaning.empty()) out << '\t' << r.meaning;
        out << '\n';
    }
}

std::string_view classify_diagnostic(std::string_view text, const DiagnosticTaxonomy& tax) {
    return tax.classify(text);
}

std::uint64_t CompileFeatureVector::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::map<std::string, CompileFeatureVector> extract_features(const Cohort& cohort, const DiagnosticTaxonomy& tax) {
    std::map<std::string, CompileFeatureVector> out;
    for (std::size_t s = 0; s < cohort.size(); ++s) {
        CompileFeatureVector v;
        const auto& events = cohort.submissions_of(s);
        for (std::size_t idx : events) {
            const auto& rec = cohort.submissions()[idx];
            if (rec.compile_status == CompileStatus::Ok) {
                ++v.counts[0];
            } else {
                ++v.counts[tax.feature_index(rec.diagnostic_text)];
            }
        }
        if (v.total() != events.size()) throw Error("feature vector does not partition the compile events");
        out.emplace(cohort.students()[s], std::move(v));
    }
    return out;
}

void write_features(std::ostream& out, const std::map<std::string, CompileFeatureVector>& features,
                    const DiagnosticTaxonomy& tax) {
    std::vector<std::string> header = {"student_id", "none"};
    for (const auto& r : tax.rules()) header.push_back(r.category);
    header.emplace_back(DiagnosticTaxonomy::kOther);
    csv::write_row(out, header);
    for (const auto& [id, v] : features) {
        std::vector<std::string> row = {id};
        for (auto c : v.counts) row.push_back(std::to_string(c));
        csv::write_row(out, row);
    }
}

}  // namespace mooc
