#include "mooc/patmine.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mooc/csv.hpp"

namespace mooc {

void validate(const Pattern& p) {
    if (p.symbols.empty()) throw Error("pattern must contain at least one symbol");
    for (int s : p.symbols) {
        if (!in_alphabet(p.kind, s)) {
            throw Error("symbol " + std::to_string(s) + " is not in the " + std::string(to_string(p.kind)) +
                        " alphabet");
        }
    }
}

// ---------------------------------------------------------------------------
// Text form

namespace {

constexpr std::string_view kWildcard = "(*)";

void skip_space(std::string_view text, std::size_t& pos) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
}

void expect_wildcard(std::string_view text, std::size_t& pos) {
    if (text.substr(pos, kWildcard.size()) != kWildcard) {
        throw PatternSyntaxError(text, pos, pos == 0 ? "pattern must start with '(*)'" : "expected '(*)'");
    }
    pos += kWildcard.size();
}

}  // namespace

Pattern parse_pattern(std::string_view text, SequenceKind kind) {
    Pattern p;
    p.kind = kind;
    std::size_t pos = 0;
    skip_space(text, pos);
    expect_wildcard(text, pos);
    skip_space(text, pos);
    if (pos == text.size()) throw PatternSyntaxError(text, pos, "pattern needs at least one symbol");
    while (pos < text.size()) {
        const std::size_t start = pos;
        int value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
        if (ec != std::errc()) throw PatternSyntaxError(text, start, "expected an integer symbol");
        pos = static_cast<std::size_t>(ptr - text.data());
        if (!in_alphabet(kind, value)) {
            throw PatternSyntaxError(text, start,
                                     "symbol " + std::to_string(value) + " is not in the " +
                                         std::string(to_string(kind)) + " alphabet");
        }
        p.symbols.push_back(value);
        skip_space(text, pos);
        if (pos == text.size()) throw PatternSyntaxError(text, pos, "pattern must end with '(*)'");
        expect_wildcard(text, pos);
        skip_space(text, pos);
    }
    return p;
}

std::string format_pattern(const Pattern& p) {
    std::string out(kWildcard);
    for (int s : p.symbols) {
        out += std::to_string(s);
        out += kWildcard;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gap policy

GapPolicy::Interior parse_interior(std::string_view text) {
    if (text == "one_or_more") return GapPolicy::Interior::OneOrMore;
    if (text == "zero_or_more") return GapPolicy::Interior::ZeroOrMore;
    throw Error("interior gap must be one_or_more or zero_or_more, got '" + std::string(text) + "'");
}

GapPolicy::Boundary parse_boundary(std::string_view text) {
    if (text == "required") return GapPolicy::Boundary::Required;
    if (text == "free") return GapPolicy::Boundary::Free;
    throw Error("boundary gap must be required or free, got '" + std::string(text) + "'");
}

std::string_view to_string(GapPolicy::Interior v) {
    return v == GapPolicy::Interior::OneOrMore ? "one_or_more" : "zero_or_more";
}

std::string_view to_string(GapPolicy::Boundary v) { return v == GapPolicy::Boundary::Required ? "required" : "free"; }

std::size_t max_embeddable_length(std::size_t sequence_length, GapPolicy policy) {
    const std::size_t margin = policy.margin();
    if (sequence_length < 2 * margin + 1) return 0;
    const std::size_t usable = sequence_length - 2 * margin;
    return (usable - 1) / policy.min_step() + 1;
}

// ---------------------------------------------------------------------------
// Matching

namespace {

constexpr std::ptrdiff_t kNoMatch = -1;

// Last index a matched symbol may occupy, or -1 when nothing fits.
std::ptrdiff_t last_allowed(std::size_t n, GapPolicy policy) {
    return static_cast<std::ptrdiff_t>(n) - 1 - static_cast<std::ptrdiff_t>(policy.margin());
}

// First index >= from holding `symbol` and not beyond `limit`.
std::ptrdiff_t find_from(const std::vector<int>& seq, std::ptrdiff_t from, std::ptrdiff_t limit, int symbol) {
    for (std::ptrdiff_t i = from; i <= limit; ++i) {
        if (seq[static_cast<std::size_t>(i)] == symbol) return i;
    }
    return kNoMatch;
}

}  // namespace

bool matches(const FeatureSequence& seq, const Pattern& p, GapPolicy policy) {
    if (seq.kind != p.kind) {
        throw Error("cannot match a " + std::string(to_string(p.kind)) + " pattern against a " +
                    std::string(to_string(seq.kind)) + " sequence");
    }
    if (p.symbols.empty()) return false;
    // Taking the earliest admissible position for each symbol is optimal: the
    // constraints only bound each position from below by its predecessor and
    // bound the last one from above.
    const std::ptrdiff_t limit = last_allowed(seq.size(), policy);
    std::ptrdiff_t from = static_cast<std::ptrdiff_t>(policy.margin());
    for (int symbol : p.symbols) {
        const std::ptrdiff_t at = find_from(seq.symbols, from, limit, symbol);
        if (at == kNoMatch) return false;
        from = at + static_cast<std::ptrdiff_t>(policy.min_step());
    }
    return true;
}

// ---------------------------------------------------------------------------
// Statistics

double PatternStats::accuracy() const noexcept {
    if (unsupported()) return 0.0;
    return static_cast<double>(fail_matches) / static_cast<double>(fail_matches + pass_matches);
}

double PatternStats::recall() const noexcept {
    if (fail_total == 0) return 0.0;
    return static_cast<double>(fail_matches) / static_cast<double>(fail_total);
}

PatternStats pattern_stats(const Pattern& p, std::span<const FeatureSequence> fail_seqs,
                           std::span<const FeatureSequence> pass_seqs, GapPolicy policy) {
    if (fail_seqs.empty() || pass_seqs.empty()) throw Error("pattern_stats needs non-empty fail and pass groups");
    PatternStats st;
    st.fail_total = fail_seqs.size();
    st.pass_total = pass_seqs.size();
    for (const auto& s : fail_seqs) st.fail_matches += matches(s, p, policy) ? 1 : 0;
    for (const auto& s : pass_seqs) st.pass_matches += matches(s, p, policy) ? 1 : 0;
    return st;
}

// ---------------------------------------------------------------------------
// Mining

void validate(const MiningConfig& cfg) {
    if (!std::isfinite(cfg.min_recall) || cfg.min_recall < 0.0) throw Error("min_recall must be a finite value >= 0");
    if (!std::isfinite(cfg.min_accuracy) || cfg.min_accuracy < 0.0) {
        throw Error("min_accuracy must be a finite value >= 0");
    }
}

bool canonical_less(const MinedPattern& a, const MinedPattern& b) {
    using u = unsigned long long;
    const auto& x = a.stats;
    const auto& y = b.stats;
    // Exact rational comparisons; accuracy x.f/(x.f+x.p) against y.f/(y.f+y.p).
    const u acc_x = static_cast<u>(x.fail_matches) * (y.fail_matches + y.pass_matches);
    const u acc_y = static_cast<u>(y.fail_matches) * (x.fail_matches + x.pass_matches);
    if (acc_x != acc_y) return acc_x > acc_y;
    const u rec_x = static_cast<u>(x.fail_matches) * y.fail_total;
    const u rec_y = static_cast<u>(y.fail_matches) * x.fail_total;
    if (rec_x != rec_y) return rec_x > rec_y;
    if (a.pattern.length() != b.pattern.length()) return a.pattern.length() < b.pattern.length();
    return a.pattern.symbols < b.pattern.symbols;
}

namespace {

// A candidate with, per sequence, the end of its earliest admissible embedding.
struct Candidate {
    std::vector<int> symbols;
    std::vector<std::ptrdiff_t> fail_ends;
    std::vector<std::ptrdiff_t> pass_ends;
};

std::vector<std::ptrdiff_t> extend_ends(std::span<const FeatureSequence> seqs, const std::vector<std::ptrdiff_t>* prev,
                                        int symbol, GapPolicy policy, std::ptrdiff_t limit) {
    std::vector<std::ptrdiff_t> ends(seqs.size(), kNoMatch);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        std::ptrdiff_t from = static_cast<std::ptrdiff_t>(policy.margin());
        if (prev) {
            if ((*prev)[i] == kNoMatch) continue;
            from = (*prev)[i] + static_cast<std::ptrdiff_t>(policy.min_step());
        }
        ends[i] = find_from(seqs[i].symbols, from, limit, symbol);
    }
    return ends;
}

std::size_t count_matches(const std::vector<std::ptrdiff_t>& ends) {
    return static_cast<std::size_t>(std::count_if(ends.begin(), ends.end(), [](auto e) { return e != kNoMatch; }));
}

void check_group(std::span<const FeatureSequence> seqs, SequenceKind kind, std::size_t length, const char* name) {
    for (const auto& s : seqs) {
        if (s.kind != kind) throw Error(std::string("mine: mixed sequence kinds in the ") + name + " group");
        if (s.size() != length) throw Error(std::string("mine: mixed sequence lengths in the ") + name + " group");
    }
}

}  // namespace

std::vector<MinedPattern> mine(std::span<const FeatureSequence> fail_seqs, std::span<const FeatureSequence> pass_seqs,
                               const MiningConfig& cfg) {
    validate(cfg);
    if (fail_seqs.empty()) throw Error("mine: the fail group is empty");
    if (pass_seqs.empty()) throw Error("mine: the pass group is empty");
    const SequenceKind kind = fail_seqs.front().kind;
    const std::size_t length = fail_seqs.front().size();
    check_group(fail_seqs, kind, length, "fail");
    check_group(pass_seqs, kind, length, "pass");

    const GapPolicy policy = cfg.gap_policy;
    const std::size_t embeddable = max_embeddable_length(length, policy);
    const std::size_t max_len =
        cfg.max_pattern_length == 0 ? embeddable : std::min(cfg.max_pattern_length, embeddable);
    const std::ptrdiff_t limit = last_allowed(length, policy);
    const auto symbols = alphabet(kind);

    std::vector<MinedPattern> out;
    std::vector<Candidate> frontier;
    frontier.push_back({});  // the empty prefix seeds level 1

    for (std::size_t level = 1; level <= max_len && !frontier.empty(); ++level) {
        std::vector<Candidate> next;
        for (const auto& parent : frontier) {
            const bool root = parent.symbols.empty();
            for (int symbol : symbols) {
                Candidate c;
                c.symbols = parent.symbols;
                c.symbols.push_back(symbol);
                c.fail_ends = extend_ends(fail_seqs, root ? nullptr : &parent.fail_ends, symbol, policy, limit);
                c.pass_ends = extend_ends(pass_seqs, root ? nullptr : &parent.pass_ends, symbol, policy, limit);

                PatternStats st;
                st.fail_total = fail_seqs.size();
                st.pass_total = pass_seqs.size();
                st.fail_matches = count_matches(c.fail_ends);
                st.pass_matches = count_matches(c.pass_ends);
                if (st.unsupported()) continue;  // no extension can match either
                if (st.recall() < cfg.min_recall) continue;
                if (st.accuracy() >= cfg.min_accuracy) out.push_back({Pattern{kind, c.symbols}, st});
                next.push_back(std::move(c));
            }
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end(), canonical_less);
    return out;
}

void write_patterns_header(std::ostream& out) {
    csv::write_row(out, {"kind", "pattern", "accuracy", "recall", "fail_matches", "pass_matches"});
}

void write_patterns(std::ostream& out, std::span<const MinedPattern> patterns) {
    char acc[32], rec[32];
    for (const auto& m : patterns) {
        std::snprintf(acc, sizeof acc, "%.4f", m.stats.accuracy());
        std::snprintf(rec, sizeof rec, "%.4f", m.stats.recall());
        csv::write_row(out, {std::string(to_string(m.pattern.kind)), format_pattern(m.pattern), acc, rec,
                             std::to_string(m.stats.fail_matches), std::to_string(m.stats.pass_matches)});
    }
}

}  // namespace mooc
