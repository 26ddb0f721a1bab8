#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

#include "mooc/diaglex.hpp"
#include "mooc/error.hpp"

using namespace mooc;

namespace {

SubmissionRecord event(const std::string& student, const std::string& diagnostic) {
    SubmissionRecord r;
    r.student_id = student;
    r.assignment_id = "a1";
    r.timestamp = parse_timestamp("2019-03-01T00:00:00Z");
    if (!diagnostic.empty()) {
        r.compile_status = CompileStatus::Error;
        r.diagnostic_text = diagnostic;
    }
    return r;
}

// Applies rules one at a time, the way a reader of the taxonomy file would.
std::string sequential_oracle(const std::string& text, const DiagnosticTaxonomy& tax) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto& r : tax.rules()) {
        if (r.pattern.empty() || r.is_regex()) continue;
        std::string key = r.pattern;
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        if (lower.find(key) != std::string::npos) return r.category;
    }
    return "Other";
}

}  // namespace

TEST_CASE("default taxonomy layout") {
    const auto tax = default_taxonomy();
    const auto names = tax.feature_names();
    REQUIRE(names.size() == 23);
    CHECK(names.front() == "None");
    CHECK(names.back() == "Other");
    // 22 error categories: 21 rules plus the fallback.
    CHECK(tax.rules().size() + 1 == 22);

    const char* table[][2] = {
        {"Syntax error", "syntax error"},
        {"Redefinition of main", "redefinition of 'main'"},
        {"Undeclared", "undeclared"},
        {"Invalid value", "invalid value"},
        {"Stray", "stray"},
        {"Invalid operands", "invalid operands"},
        {"Not a function", "not a function"},
        {"Conflicting", "conflicting"},
        {"Not use struct", "invalid use of 'struct'"},
    };
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(tax.rules()[i].category == table[i][0]);
        CHECK(tax.rules()[i].pattern == table[i][1]);
        CHECK(tax.feature_index_of(table[i][0]) == i + 1);
    }
    CHECK(tax.rules()[0].meaning == "Illegal statement in code");
    CHECK(tax.rules()[2].meaning == "The variable is not declared");

    std::set<std::string> unique(names.begin(), names.end());
    CHECK(unique.size() == names.size());
}

TEST_CASE("classification") {
    const auto tax = default_taxonomy();
    CHECK(classify_diagnostic("prog.c:4: error: 'x' undeclared (first use in this function)", tax) == "Undeclared");
    CHECK(classify_diagnostic("prog.c:4: error: expected ';' before '}' token", tax) == "Other");
    CHECK(classify_diagnostic("syntax error near 'y' undeclared", tax) == "Syntax error");
    CHECK(classify_diagnostic("'y' UNDECLARED; Syntax Error", tax) == "Syntax error");
    CHECK(classify_diagnostic("STRAY '\\302' IN PROGRAM", tax) == "Stray");
    CHECK(tax.feature_index("totally unknown") == 22);
    CHECK(tax.feature_index("redefinition of 'main'") == 2);
}

TEST_CASE("first match wins, checked against a sequential oracle") {
    const auto tax = default_taxonomy();
    const std::vector<std::string> fragments = {
        "syntax error", "redefinition of 'main'", "undeclared", "invalid value", "stray", "invalid operands",
        "not a function", "conflicting", "invalid use of 'struct'", "expected ';'", "warning", "note:"};
    std::mt19937 gen(8);
    for (int i = 0; i < 2000; ++i) {
        std::string text = "prog.c:1:1: error:";
        const int parts = 1 + static_cast<int>(gen() % 3);
        for (int k = 0; k < parts; ++k) text += " " + fragments[gen() % fragments.size()];
        CAPTURE(text);
        CHECK(classify_diagnostic(text, tax) == sequential_oracle(text, tax));
    }
}

TEST_CASE("regex rules and taxonomy files") {
    std::ostringstream cfg;
    cfg << "# custom taxonomy\n";
    cfg << "Syntax error\tsyntax error\tIllegal statement in code\n";
    cfg << "Missing semicolon\tre:expected\\s+';'\n";
    for (int i = 3; i <= 21; ++i) cfg << "Rule " << i << "\tkeyword" << i << "\n";
    std::istringstream in(cfg.str());
    const auto tax = read_taxonomy(in, "custom.cfg");
    CHECK(tax.rules()[1].is_regex());
    CHECK(classify_diagnostic("error: expected   ';' before 'return'", tax) == "Missing semicolon");
    CHECK(classify_diagnostic("error: expected ')'", tax) == "Other");
    CHECK(classify_diagnostic("see KEYWORD7 here", tax) == "Rule 7");

    std::ostringstream saved;
    write_taxonomy(saved, tax);
    std::istringstream back(saved.str());
    const auto again = read_taxonomy(back);
    CHECK(again.rules() == tax.rules());
    for (std::size_t i = 0; i < tax.rules().size(); ++i) CHECK(again.rules()[i].meaning == tax.rules()[i].meaning);

    std::ostringstream def;
    write_taxonomy(def, default_taxonomy());
    std::istringstream def_in(def.str());
    CHECK(read_taxonomy(def_in).rules() == default_taxonomy().rules());
}

TEST_CASE("bad taxonomy files") {
    std::istringstream too_few("A\ta\nB\tb\n");
    CHECK_THROWS(read_taxonomy(too_few));

    std::ostringstream dup;
    for (int i = 1; i <= 21; ++i) dup << (i == 5 ? std::string("Rule 1") : "Rule " + std::to_string(i)) << "\tk\n";
    std::istringstream dup_in(dup.str());
    CHECK_THROWS(read_taxonomy(dup_in));

    std::ostringstream reserved;
    for (int i = 1; i <= 21; ++i) reserved << (i == 3 ? std::string("Other") : "Rule " + std::to_string(i)) << "\tk\n";
    std::istringstream reserved_in(reserved.str());
    CHECK_THROWS(read_taxonomy(reserved_in));

    std::ostringstream bad_regex;
    for (int i = 1; i <= 21; ++i) bad_regex << "Rule " << i << "\t" << (i == 2 ? "re:([" : "k") << "\n";
    std::istringstream bad_regex_in(bad_regex.str());
    CHECK_THROWS(read_taxonomy(bad_regex_in));
}

TEST_CASE("feature extraction") {
    const auto tax = default_taxonomy();
    const GroupingSpec grouping({{"a1", 1}}, 1);

    SUBCASE("direct counts") {
        const auto cohort = assemble_cohort({event("s1", ""), event("s1", ""), event("s1", "x undeclared")},
                                            {{"s1", 50}, {"s2", 90}}, grouping);
        const auto f = extract_features(cohort, tax);
        const auto& v = f.at("s1").counts;
        CHECK(v[0] == 2);
        CHECK(v[tax.feature_index_of("Undeclared")] == 1);
        CHECK(f.at("s1").total() == 3);
        CHECK(f.at("s2").total() == 0);
        CHECK(f.at("s2") == CompileFeatureVector{});
    }

    SUBCASE("independent recount and permutation invariance") {
        const std::vector<std::string> texts = {"",
                                                "",
                                                "syntax error before 'int'",
                                                "'n' undeclared",
                                                "stray '\\343' in program",
                                                "expected ';'",
                                                "conflicting types for 'f'",
                                                "called object is not a function"};
        std::mt19937 gen(4);
        std::vector<SubmissionRecord> events;
        std::map<std::string, std::vector<std::uint64_t>> expected;
        for (int s = 1; s <= 5; ++s) {
            const std::string id = "s" + std::to_string(s);
            expected[id].assign(23, 0);
            const int n = static_cast<int>(gen() % 30);
            for (int k = 0; k < n; ++k) {
                const auto& t = texts[gen() % texts.size()];
                events.push_back(event(id, t));
                ++expected[id][t.empty() ? 0 : tax.feature_index_of(sequential_oracle(t, tax))];
            }
        }
        OutcomeMap outcomes;
        for (const auto& [id, v] : expected) outcomes[id] = 50;

        const auto f = extract_features(assemble_cohort(events, outcomes, grouping), tax);
        for (const auto& [id, v] : expected) CHECK(f.at(id).counts == v);

        std::shuffle(events.begin(), events.end(), gen);
        CHECK(extract_features(assemble_cohort(events, outcomes, grouping), tax) == f);

        std::ostringstream out;
        write_features(out, f, tax);
        std::istringstream in(out.str());
        std::string header;
        std::getline(in, header);
        CHECK(header.rfind("student_id,none,Syntax error,Redefinition of main,", 0) == 0);
        CHECK(header.size() > 6);
        CHECK(header.substr(header.size() - 6) == ",Other");
    }
}
