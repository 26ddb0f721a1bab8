#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mooc/discretize.hpp"
#include "mooc/error.hpp"

namespace mooc {

/// Gap-wildcard pattern such as `(*)2(*)2(*)-2(*)-2(*)`.
///
/// Each `(*)` stands for a run of arbitrary symbols; whether a run may be
/// empty is decided by the GapPolicy used at match time.
struct Pattern {
    SequenceKind kind = SequenceKind::Times;
    std::vector<int> symbols;

    std::size_t length() const noexcept { return symbols.size(); }
    bool operator==(const Pattern&) const = default;
};

// Throws unless the pattern is non-empty and every symbol is in the kind's alphabet.
void validate(const Pattern& p);

class PatternSyntaxError : public Error {
public:
    PatternSyntaxError(std::string_view text, std::size_t position, const std::string& what)
        : Error("pattern '" + std::string(text) + "' at offset " + std::to_string(position) + ": " + what),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

Pattern parse_pattern(std::string_view text, SequenceKind kind);
std::string format_pattern(const Pattern& p);

struct GapPolicy {
    enum class Interior { OneOrMore, ZeroOrMore };
    enum class Boundary { Required, Free };

    Interior interior = Interior::OneOrMore;
    Boundary boundary = Boundary::Required;

    // Smallest allowed distance between consecutive matched positions.
    std::size_t min_step() const noexcept { return interior == Interior::OneOrMore ? 2 : 1; }
    // Positions reserved before the first and after the last matched symbol.
    std::size_t margin() const noexcept { return boundary == Boundary::Required ? 1 : 0; }

    bool operator==(const GapPolicy&) const = default;
};

GapPolicy::Interior parse_interior(std::string_view text);
GapPolicy::Boundary parse_boundary(std::string_view text);
std::string_view to_string(GapPolicy::Interior v);
std::string_view to_string(GapPolicy::Boundary v);

// Longest pattern that can embed in a sequence of `sequence_length` symbols.
std::size_t max_embeddable_length(std::size_t sequence_length, GapPolicy policy = {});

// Throws if the kinds differ.
bool matches(const FeatureSequence& seq, const Pattern& p, GapPolicy policy = {});

struct PatternStats {
    std::size_t fail_matches = 0;
    std::size_t pass_matches = 0;
    std::size_t fail_total = 0;
    std::size_t pass_total = 0;

    // No student matched; accuracy is undefined and the pattern is dropped.
    bool unsupported() const noexcept { return fail_matches + pass_matches == 0; }
    // Fraction of matching students who failed (0 when unsupported).
    double accuracy() const noexcept;
    // Fraction of failing students matched.
    double recall() const noexcept;

    bool operator==(const PatternStats&) const = default;
};

PatternStats pattern_stats(const Pattern& p, std::span<const FeatureSequence> fail_seqs,
                           std::span<const FeatureSequence> pass_seqs, GapPolicy policy = {});

struct MiningConfig {
    double min_recall = 0.70;
    double min_accuracy = 0.70;
    // 0 means no limit beyond max_embeddable_length.
    std::size_t max_pattern_length = 6;
    GapPolicy gap_policy;
};

void validate(const MiningConfig& cfg);

struct MinedPattern {
    Pattern pattern;
    PatternStats stats;

    bool operator==(const MinedPattern&) const = default;
};

// Output order: accuracy desc, recall desc, length asc, symbols lexicographic asc.
bool canonical_less(const MinedPattern& a, const MinedPattern& b);

/// Level-wise miner.
///
/// Level 1 tries every symbol of the alphabet. A level-k pattern is extended
/// by appending each symbol only while its recall over the fail group reaches
/// min_recall; appending can only shrink the match set, so the prune loses
/// nothing. Every retained pattern of any level that is supported and also
/// reaches min_accuracy is reported.
std::vector<MinedPattern> mine(std::span<const FeatureSequence> fail_seqs, std::span<const FeatureSequence> pass_seqs,
                               const MiningConfig& cfg);

// patterns.csv header.
void write_patterns_header(std::ostream& out);
// One row per pattern: `kind,pattern,accuracy,recall,fail_matches,pass_matches`, reals to 4 places.
void write_patterns(std::ostream& out, std::span<const MinedPattern> patterns);

}  // namespace mooc
