#include "mooc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "mooc/error.hpp"
#include "mooc/rng.hpp"

namespace mooc::synth {

namespace {

constexpr int kMaxSequenceAttempts = 20000;
constexpr int kMaxTimesAttempts = 200;

// Allowed deviation from the group mean, as a fraction of it, per times symbol.
// Bucket edges are avoided so floating-point means cannot flip a bucket.
struct DeviationBand {
    double lo;
    double hi;
};

DeviationBand band_for(int symbol) {
    switch (symbol) {
        case -2: return {-0.85, -0.55};
        case -1: return {-0.45, -0.05};
        case 0: return {0.0, 0.0};
        case 1: return {0.05, 0.45};
        case 2: return {0.55, 2.0};
    }
    throw Error("synth: bad times symbol");
}

std::string student_name(std::size_t i, std::size_t n) {
    const std::size_t width = std::max<std::size_t>(3, std::to_string(n).size());
    std::string digits = std::to_string(i + 1);
    return "s" + std::string(width - digits.size(), '0') + digits;
}

std::string assignment_name(int group, std::size_t k, std::size_t per_group) {
    std::string name = group < 10 ? "a0" + std::to_string(group) : "a" + std::to_string(group);
    if (per_group > 1) name += "_" + std::to_string(k + 1);
    return name;
}

// A random index tuple satisfying the default gap policy.
std::vector<std::size_t> random_embedding(std::size_t length, std::size_t sequence_length, Rng& rng) {
    const GapPolicy policy;
    const std::size_t usable = sequence_length - 2 * policy.margin();
    const std::size_t slack = usable - (length - 1) * (policy.min_step() - 1);
    auto picks = rng.sample_sorted(slack, length);
    for (std::size_t k = 0; k < length; ++k) picks[k] += policy.margin() + k * (policy.min_step() - 1);
    return picks;
}

FeatureSequence draw_sequence(SequenceKind kind, int length, const std::vector<const PlantedPattern*>& planted,
                              const std::vector<bool>& carries, Rng& rng) {
    const auto symbols = alphabet(kind);
    FeatureSequence seq{kind, std::vector<int>(static_cast<std::size_t>(length))};
    for (int attempt = 0; attempt < kMaxSequenceAttempts; ++attempt) {
        for (auto& s : seq.symbols) s = symbols[rng.below(symbols.size())];
        for (std::size_t p = 0; p < planted.size(); ++p) {
            if (!carries[p]) continue;
            const auto& pat = planted[p]->pattern.symbols;
            const auto at = random_embedding(pat.size(), seq.size(), rng);
            for (std::size_t k = 0; k < pat.size(); ++k) seq.symbols[at[k]] = pat[k];
        }
        bool consistent = true;
        for (std::size_t p = 0; p < planted.size() && consistent; ++p) {
            consistent = oracle_match(seq, planted[p]->pattern) == carries[p];
        }
        if (consistent) return seq;
    }
    throw Error("synth: could not draw a " + std::string(to_string(kind)) +
                " sequence consistent with the planted patterns; are they nested or conflicting?");
}

// Integer deviations from the per-group target `unit`, one per student,
// landing each in its band and summing to zero; nullopt when infeasible.
std::optional<std::vector<long long>> solve_deviations(const std::vector<int>& symbols, long long unit) {
    const std::size_t n = symbols.size();
    std::vector<long long> lo(n), hi(n);
    long long sum_lo = 0, sum_hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto b = band_for(symbols[i]);
        lo[i] = static_cast<long long>(std::ceil(b.lo * static_cast<double>(unit)));
        hi[i] = static_cast<long long>(std::floor(b.hi * static_cast<double>(unit)));
        sum_lo += lo[i];
        sum_hi += hi[i];
    }
    if (sum_lo > 0 || sum_hi < 0) return std::nullopt;

    std::vector<long long> dev = lo;
    const long long need = -sum_lo;
    const long long capacity = sum_hi - sum_lo;
    long long placed = 0;
    if (capacity > 0) {
        for (std::size_t i = 0; i < n; ++i) {
            const long long add = (hi[i] - lo[i]) * need / capacity;
            dev[i] += add;
            placed += add;
        }
    }
    for (std::size_t i = 0; placed < need; i = (i + 1) % n) {
        if (dev[i] < hi[i]) {
            ++dev[i];
            ++placed;
        }
    }
    return dev;
}

std::string diagnostic_for(const DiagnosticRule* rule, std::size_t line) {
    const std::string where = "prog.c:" + std::to_string(line) + ":";
    if (!rule) return where + "2: error: expected ';' before '}' token";
    static const std::map<std::string, std::string, std::less<>> templates = {
        {"syntax error", "5: error: syntax error before 'int'"},
        {"redefinition of 'main'", "5: error: redefinition of 'main'"},
        {"undeclared", "9: error: 'count' undeclared (first use in this function)"},
        {"invalid value", "14: error: invalid value in array size"},
        {"stray", "1: error: stray '\\343' in program"},
        {"invalid operands", "12: error: invalid operands to binary + (have 'int *' and 'int *')"},
        {"not a function", "7: error: called object 'sum' is not a function"},
        {"conflicting", "6: error: conflicting types for 'max'"},
        {"invalid use of 'struct'", "3: error: invalid use of 'struct' without a complete type"},
    };
    auto it = templates.find(rule->pattern);
    if (it != templates.end()) return where + it->second;
    return where + "1: error: " + rule->pattern;
}

Outcome flip(Outcome o) { return o == Outcome::Fail ? Outcome::Pass : Outcome::Fail; }

double draw_score(Outcome label, Rng& rng) {
    // Half-point grades: [0, 59.5] for Fail, [60, 100] for Pass.
    if (label == Outcome::Fail) return static_cast<double>(rng.below(120)) / 2.0;
    return 60.0 + static_cast<double>(rng.below(81)) / 2.0;
}

std::vector<Outcome> draw_latent_classes(std::size_t n, double fail_fraction, Rng& rng) {
    const auto fails = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fail_fraction));
    std::vector<Outcome> classes(n, Outcome::Pass);
    std::fill_n(classes.begin(), std::min(fails, n), Outcome::Fail);
    rng.shuffle(classes);
    return classes;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void SynthConfig::validate() const {
    if (n_students == 0) throw Error("synth: students must be positive");
    if (groups < 1) throw Error("synth: groups must be positive");
    if (assignments_per_group == 0) throw Error("synth: assignments_per_group must be positive");
    if (!(fail_fraction > 0.0 && fail_fraction < 1.0)) throw Error("synth: fail_fraction must be in (0, 1)");
    if (!(label_noise >= 0.0 && label_noise < 0.5)) throw Error("synth: label_noise must be in [0, 0.5)");
    if (base_submissions < 20) throw Error("synth: base_submissions must be at least 20");
    if (!(order.low >= 1.0 && order.high > order.low)) throw Error("synth: order thresholds must satisfy 1 <= low < high");
    const auto low = static_cast<std::int64_t>(std::floor(order.low));
    const auto high = static_cast<std::int64_t>(std::floor(order.high));
    const auto n = static_cast<std::int64_t>(n_students);
    if (low < n || high - low < n || population - high < n) {
        throw Error("synth: every order bucket needs at least as many ranks as students (population " +
                    std::to_string(population) + ")");
    }
    parse_timestamp(start);
    for (const auto& p : planted) {
        mooc::validate(p.pattern);
        if (p.pattern.length() > max_embeddable_length(static_cast<std::size_t>(groups))) {
            throw Error("synth: planted pattern " + format_pattern(p.pattern) + " cannot embed in " +
                        std::to_string(groups) + " groups");
        }
        if (!(p.fail_rate >= 0.0 && p.fail_rate <= 1.0 && p.pass_rate >= 0.0 && p.pass_rate <= 1.0)) {
            throw Error("synth: carrier rates must be in [0, 1]");
        }
    }
    for (const auto& s : compile_signal) {
        if (!(s.fail_rate >= 0.0 && s.pass_rate >= 0.0) || !std::isfinite(s.fail_rate) || !std::isfinite(s.pass_rate)) {
            throw Error("synth: compile rates must be finite and >= 0");
        }
    }
}

SynthConfig synth_config_from(const KeyValueConfig& kv) {
    SynthConfig cfg;
    cfg.seed = kv.get_u64("seed", cfg.seed);
    cfg.n_students = static_cast<std::size_t>(kv.get_u64("students", cfg.n_students));
    cfg.groups = static_cast<int>(kv.get_int("groups", cfg.groups));
    cfg.assignments_per_group = static_cast<std::size_t>(kv.get_u64("assignments_per_group", cfg.assignments_per_group));
    cfg.fail_fraction = kv.get_double("fail_fraction", cfg.fail_fraction);
    cfg.label_noise = kv.get_double("label_noise", cfg.label_noise);
    cfg.base_submissions = static_cast<int>(kv.get_int("base_submissions", cfg.base_submissions));
    cfg.population = kv.get_int("population", cfg.population);
    cfg.order.low = kv.get_double("order.low", cfg.order.low);
    cfg.order.high = kv.get_double("order.high", cfg.order.high);
    cfg.start = kv.get_string("start", cfg.start);
    for (const auto& name : kv.subsections("planted")) {
        const std::string key = "planted." + name;
        const auto kind = parse_kind(kv.get_string(key + ".kind", ""));
        PlantedPattern p;
        p.pattern = parse_pattern(kv.get_string(key + ".pattern", ""), kind);
        p.fail_rate = kv.get_double(key + ".fail_rate", p.fail_rate);
        p.pass_rate = kv.get_double(key + ".pass_rate", p.pass_rate);
        cfg.planted.push_back(std::move(p));
    }
    for (const auto& name : kv.subsections("compile")) {
        const std::string key = "compile." + name;
        CompileSignal s;
        s.category = kv.get_string(key + ".category", "");
        s.fail_rate = kv.get_double(key + ".fail_rate", 0.0);
        s.pass_rate = kv.get_double(key + ".pass_rate", 0.0);
        cfg.compile_signal.push_back(std::move(s));
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Generation

SynthCohort gen_cohort(const SynthConfig& cfg, const DiagnosticTaxonomy& tax) {
    cfg.validate();
    const std::size_t n = cfg.n_students;
    const int groups = cfg.groups;
    const std::size_t per_group = cfg.assignments_per_group;

    // Resolve compile categories before drawing anything.
    std::vector<std::pair<std::size_t, const CompileSignal*>> signals;
    for (const auto& s : cfg.compile_signal) {
        const std::size_t idx = tax.feature_index_of(s.category);
        if (idx == 0) throw Error("synth: 'None' is the remainder of the submissions and takes no rate");
        if (idx < DiagnosticTaxonomy::kFeatureCount - 1) {
            const auto& rule = tax.rules()[idx - 1];
            if (rule.pattern.empty() || rule.is_regex()) {
                if (s.fail_rate > 0.0 || s.pass_rate > 0.0) {
                    throw Error("synth: cannot synthesize diagnostics for category '" + s.category + "'");
                }
            }
        }
        signals.emplace_back(idx, &s);
    }

    Rng rng(cfg.seed);
    Rng class_rng(rng.fork()), seq_rng(rng.fork()), times_rng(rng.fork()), log_rng(rng.fork()),
        compile_rng(rng.fork()), score_rng(rng.fork());

    SynthCohort out;
    out.config = cfg;

    // Classes, labels and scores.
    const auto latent = draw_latent_classes(n, cfg.fail_fraction, class_rng);
    out.truth.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& t = out.truth[i];
        t.id = student_name(i, n);
        t.latent = latent[i];
        t.observed = score_rng.bernoulli(cfg.label_noise) ? flip(latent[i]) : latent[i];
        t.score = draw_score(t.observed, score_rng);
        out.outcomes.emplace(t.id, t.score);
        t.carries.resize(cfg.planted.size());
        for (std::size_t p = 0; p < cfg.planted.size(); ++p) {
            const double rate = latent[i] == Outcome::Fail ? cfg.planted[p].fail_rate : cfg.planted[p].pass_rate;
            t.carries[p] = class_rng.bernoulli(rate);
        }
    }

    // Symbol sequences.
    auto planted_of = [&](SequenceKind kind, std::vector<std::size_t>& index) {
        std::vector<const PlantedPattern*> ps;
        index.clear();
        for (std::size_t p = 0; p < cfg.planted.size(); ++p) {
            if (cfg.planted[p].pattern.kind == kind) {
                ps.push_back(&cfg.planted[p]);
                index.push_back(p);
            }
        }
        return ps;
    };
    auto carries_of = [&](std::size_t student, const std::vector<std::size_t>& index) {
        std::vector<bool> c;
        for (auto p : index) c.push_back(out.truth[student].carries[p]);
        return c;
    };

    out.sequences.length = groups;
    out.sequences.students.resize(n);
    std::vector<std::size_t> index;
    for (auto kind : {SequenceKind::Order, SequenceKind::Plagiarism}) {
        const auto ps = planted_of(kind, index);
        for (std::size_t i = 0; i < n; ++i) {
            auto seq = draw_sequence(kind, groups, ps, carries_of(i, index), seq_rng);
            (kind == SequenceKind::Order ? out.sequences.students[i].order : out.sequences.students[i].plagiarism) =
                std::move(seq);
        }
    }

    // Times sequences must admit counts whose group means put every student
    // in their bucket; redraw the whole kind until they do.
    const auto times_planted = planted_of(SequenceKind::Times, index);
    const long long unit = static_cast<long long>(cfg.base_submissions) * static_cast<long long>(per_group);
    std::vector<std::vector<long long>> totals(n, std::vector<long long>(static_cast<std::size_t>(groups)));
    bool realized = false;
    for (int attempt = 0; attempt < kMaxTimesAttempts && !realized; ++attempt) {
        for (std::size_t i = 0; i < n; ++i) {
            out.sequences.students[i].times =
                draw_sequence(SequenceKind::Times, groups, times_planted, carries_of(i, index), times_rng);
        }
        realized = true;
        for (int g = 0; g < groups && realized; ++g) {
            std::vector<int> column(n);
            for (std::size_t i = 0; i < n; ++i) column[i] = out.sequences.students[i].times.symbols[g];
            auto dev = solve_deviations(column, unit);
            if (!dev) {
                realized = false;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) totals[i][g] = unit + (*dev)[i];
        }
    }
    if (!realized) throw Error("synth: times sequences could not be realized; use more students");

    for (std::size_t i = 0; i < n; ++i) {
        auto& s = out.sequences.students[i];
        s.student_id = out.truth[i].id;
        s.outcome = out.truth[i].observed;
    }

    // Grouping.
    std::map<std::string, int> grouping;
    for (int g = 1; g <= groups; ++g) {
        for (std::size_t k = 0; k < per_group; ++k) grouping.emplace(assignment_name(g, k, per_group), g);
    }
    out.grouping = GroupingSpec(std::move(grouping), groups);

    // Raw logs.
    const Timestamp start = parse_timestamp(cfg.start);
    const auto low = static_cast<std::int64_t>(std::floor(cfg.order.low));
    const auto high = static_cast<std::int64_t>(std::floor(cfg.order.high));
    const std::int64_t bucket_lo[4] = {0, 1, low + 1, high + 1};
    const std::int64_t bucket_hi[4] = {0, low, high, cfg.population};

    std::vector<std::vector<std::size_t>> rows_of(n);  // submission indices per student
    for (int g = 1; g <= groups; ++g) {
        for (std::size_t k = 0; k < per_group; ++k) {
            const std::string assignment = assignment_name(g, k, per_group);
            const Timestamp release = start + std::chrono::days{7 * (g - 1)} + std::chrono::hours{24 * k};
            std::set<std::int64_t> used_ranks;
            for (std::size_t i = 0; i < n; ++i) {
                const int symbol = out.sequences.students[i].order.symbols[g - 1];
                std::int64_t rank = 0;
                do {
                    rank = log_rng.range(bucket_lo[symbol], bucket_hi[symbol]);
                } while (!used_ranks.insert(rank).second);

                const long long total = totals[i][g - 1];
                const long long count = total / static_cast<long long>(per_group) +
                                        (static_cast<long long>(k) < total % static_cast<long long>(per_group) ? 1 : 0);
                for (long long c = 0; c < count; ++c) {
                    SubmissionRecord rec;
                    rec.student_id = out.truth[i].id;
                    rec.assignment_id = assignment;
                    rec.timestamp = release + std::chrono::minutes{rank + 17 * c};
                    rec.submission_order = rank;
                    rows_of[i].push_back(out.submissions.size());
                    out.submissions.push_back(std::move(rec));
                }
            }
        }
    }

    // Plagiarism flags: bucket 1 gets 1-2 flags, bucket 2 gets 3-5, within the group.
    for (std::size_t i = 0; i < n; ++i) {
        std::map<int, std::vector<std::size_t>> by_group;
        for (auto r : rows_of[i]) by_group[out.grouping.group_of(out.submissions[r].assignment_id)].push_back(r);
        for (auto& [g, rows] : by_group) {
            const int symbol = out.sequences.students[i].plagiarism.symbols[g - 1];
            std::size_t flags = 0;
            if (symbol == 1) flags = static_cast<std::size_t>(log_rng.range(1, 2));
            if (symbol == 2) flags = static_cast<std::size_t>(log_rng.range(3, std::min<std::int64_t>(5, rows.size())));
            for (auto pick : log_rng.sample_sorted(rows.size(), flags)) out.submissions[rows[pick]].plagiarism_flag = true;
        }
    }

    // Compile outcomes: Poisson error counts per category, the rest succeed.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t events = rows_of[i].size();
        std::vector<std::size_t> labels;  // feature index per event
        for (const auto& [idx, sig] : signals) {
            const double rate = out.truth[i].latent == Outcome::Fail ? sig->fail_rate : sig->pass_rate;
            const auto count = compile_rng.poisson(rate);
            labels.insert(labels.end(), count, idx);
        }
        compile_rng.shuffle(labels);
        if (labels.size() > events) labels.resize(events);
        labels.resize(events, 0);
        compile_rng.shuffle(labels);
        for (std::size_t e = 0; e < events; ++e) {
            auto& rec = out.submissions[rows_of[i][e]];
            if (labels[e] == 0) continue;
            rec.compile_status = CompileStatus::Error;
            const bool other = labels[e] == DiagnosticTaxonomy::kFeatureCount - 1;
            rec.diagnostic_text = diagnostic_for(other ? nullptr : &tax.rules()[labels[e] - 1], 1 + e % 80);
            if (tax.feature_index(rec.diagnostic_text) != labels[e]) {
                throw Error("synth: generated diagnostic does not classify as '" +
                            tax.feature_names()[labels[e]] + "'");
            }
        }
    }

    // Log order: chronological, then student, then assignment.
    std::vector<std::size_t> perm(out.submissions.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](auto a, auto b) {
        const auto& x = out.submissions[a];
        const auto& y = out.submissions[b];
        return std::tie(x.timestamp, x.student_id, x.assignment_id) < std::tie(y.timestamp, y.student_id, y.assignment_id);
    });
    std::vector<SubmissionRecord> sorted;
    sorted.reserve(perm.size());
    for (auto p : perm) sorted.push_back(std::move(out.submissions[p]));
    out.submissions = std::move(sorted);

    // Sequence rows follow cohort order (lexicographic ids, which student_name preserves).
    return out;
}

nlohmann::json SynthCohort::manifest() const {
    using nlohmann::json;
    json m;
    m["rng"] = "mt19937_64; uniform01 = (draw >> 11) * 2^-53; integers by Lemire multiply-shift; "
               "Poisson by Knuth product method in chunks of rate <= 30";
    m["seed"] = config.seed;
    m["students"] = config.n_students;
    m["groups"] = config.groups;
    m["assignments_per_group"] = config.assignments_per_group;
    m["fail_fraction"] = config.fail_fraction;
    m["label_noise"] = config.label_noise;
    m["base_submissions"] = config.base_submissions;
    m["population"] = config.population;
    m["order_thresholds"] = {config.order.low, config.order.high};
    m["start"] = config.start;

    std::size_t observed_fail = 0;
    for (const auto& t : truth) observed_fail += t.observed == Outcome::Fail ? 1 : 0;

    json planted = json::array();
    for (std::size_t p = 0; p < config.planted.size(); ++p) {
        std::size_t fail_carriers = 0, pass_carriers = 0;
        for (const auto& t : truth) {
            if (!t.carries[p]) continue;
            (t.observed == Outcome::Fail ? fail_carriers : pass_carriers)++;
        }
        json e;
        e["kind"] = to_string(config.planted[p].pattern.kind);
        e["pattern"] = format_pattern(config.planted[p].pattern);
        e["fail_rate"] = config.planted[p].fail_rate;
        e["pass_rate"] = config.planted[p].pass_rate;
        e["fail_carriers"] = fail_carriers;
        e["pass_carriers"] = pass_carriers;
        // Non-carriers are drawn not to match, so these are the exact pattern statistics.
        const std::size_t carriers = fail_carriers + pass_carriers;
        e["expected_accuracy"] = carriers ? static_cast<double>(fail_carriers) / static_cast<double>(carriers) : 0.0;
        e["expected_recall"] =
            observed_fail ? static_cast<double>(fail_carriers) / static_cast<double>(observed_fail) : 0.0;
        planted.push_back(std::move(e));
    }
    m["planted"] = std::move(planted);

    json signal = json::array();
    for (const auto& s : config.compile_signal) {
        signal.push_back({{"category", s.category}, {"fail_rate", s.fail_rate}, {"pass_rate", s.pass_rate}});
    }
    m["compile_signal"] = std::move(signal);

    json students = json::array();
    for (const auto& t : truth) {
        json carried = json::array();
        for (std::size_t p = 0; p < t.carries.size(); ++p) {
            if (t.carries[p]) carried.push_back(p);
        }
        students.push_back({{"id", t.id},
                            {"latent", to_string(t.latent)},
                            {"label", to_string(t.observed)},
                            {"score", t.score},
                            {"carries", std::move(carried)}});
    }
    m["cohort"] = std::move(students);
    return m;
}

void write_cohort_files(const SynthCohort& cohort, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("submissions.csv");
        write_submissions(out, cohort.submissions);
    }
    {
        auto out = open("outcomes.csv");
        write_outcomes(out, cohort.outcomes);
    }
    {
        auto out = open("grouping.csv");
        write_grouping(out, cohort.grouping);
    }
    {
        auto out = open("manifest.json");
        out << cohort.manifest().dump(2) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Oracles

bool oracle_match(const FeatureSequence& seq, const Pattern& p, GapPolicy policy) {
    if (p.symbols.empty()) throw Error("oracle_match: patterns are non-empty");
    if (seq.kind != p.kind) throw Error("oracle_match: kind mismatch");
    const std::size_t n = seq.size();
    const std::size_t m = p.length();
    const std::size_t margin = policy.boundary == GapPolicy::Boundary::Required ? 1 : 0;
    const std::size_t gap = policy.interior == GapPolicy::Interior::OneOrMore ? 1 : 0;

    // reach[k][i]: the first k+1 pattern symbols embed with symbol k at position i.
    std::vector<std::vector<char>> reach(m, std::vector<char>(n, 0));
    for (std::size_t i = margin; i < n; ++i) reach[0][i] = seq.symbols[i] == p.symbols[0];
    for (std::size_t k = 1; k < m; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (seq.symbols[i] != p.symbols[k]) continue;
            for (std::size_t j = 0; j + gap < i; ++j) {
                if (reach[k - 1][j]) {
                    reach[k][i] = 1;
                    break;
                }
            }
        }
    }
    for (std::size_t i = 0; i + margin < n; ++i) {
        if (reach[m - 1][i]) return true;
    }
    return false;
}

std::vector<MinedPattern> oracle_mine(std::span<const FeatureSequence> fail_seqs,
                                      std::span<const FeatureSequence> pass_seqs, const MiningConfig& cfg) {
    if (fail_seqs.empty() || pass_seqs.empty()) throw Error("oracle_mine: both groups must be non-empty");
    if (fail_seqs.size() + pass_seqs.size() > 60) throw Error("oracle_mine: at most 60 students");
    if (cfg.max_pattern_length < 1 || cfg.max_pattern_length > 4) throw Error("oracle_mine: lengths 1..4 only");
    const SequenceKind kind = fail_seqs.front().kind;
    const auto symbols = alphabet(kind);
    if (symbols.size() > 5) throw Error("oracle_mine: alphabet too large");

    std::vector<MinedPattern> out;
    for (std::size_t len = 1; len <= cfg.max_pattern_length; ++len) {
        std::vector<std::size_t> digits(len, 0);
        while (true) {
            Pattern p{kind, {}};
            for (auto d : digits) p.symbols.push_back(symbols[d]);

            std::size_t f = 0, q = 0;
            for (const auto& s : fail_seqs) f += oracle_match(s, p, cfg.gap_policy);
            for (const auto& s : pass_seqs) q += oracle_match(s, p, cfg.gap_policy);
            if (f + q > 0) {
                const double accuracy = static_cast<double>(f) / static_cast<double>(f + q);
                const double recall = static_cast<double>(f) / static_cast<double>(fail_seqs.size());
                if (recall >= cfg.min_recall && accuracy >= cfg.min_accuracy) {
                    out.push_back({p, {f, q, fail_seqs.size(), pass_seqs.size()}});
                }
            }

            std::size_t pos = len;
            while (pos > 0 && ++digits[pos - 1] == symbols.size()) digits[--pos] = 0;
            if (pos == 0) break;
        }
    }
    std::sort(out.begin(), out.end(), [](const MinedPattern& a, const MinedPattern& b) {
        const double aa = a.stats.accuracy(), ba = b.stats.accuracy();
        if (aa != ba) return aa > ba;
        const double ar = a.stats.recall(), br = b.stats.recall();
        if (ar != br) return ar > br;
        if (a.pattern.length() != b.pattern.length()) return a.pattern.length() < b.pattern.length();
        return std::lexicographical_compare(a.pattern.symbols.begin(), a.pattern.symbols.end(),
                                            b.pattern.symbols.begin(), b.pattern.symbols.end());
    });
    return out;
}

learn::Dataset gen_compile_dataset(const CompileDatasetConfig& cfg) {
    if (cfg.n < 4) throw Error("gen_compile_dataset: need at least 4 rows");
    if (cfg.rates.empty()) throw Error("gen_compile_dataset: no feature rates");
    if (!(cfg.fail_fraction > 0.0 && cfg.fail_fraction < 1.0)) throw Error("gen_compile_dataset: bad fail_fraction");
    if (!(cfg.label_noise >= 0.0 && cfg.label_noise < 0.5)) throw Error("gen_compile_dataset: bad label_noise");

    Rng rng(cfg.seed);
    const auto latent = draw_latent_classes(cfg.n, cfg.fail_fraction, rng);
    learn::Dataset d;
    d.features = learn::Matrix(cfg.n, cfg.rates.size());
    for (std::size_t f = 0; f < cfg.rates.size(); ++f) d.feature_names.push_back("f" + std::to_string(f));
    for (std::size_t r = 0; r < cfg.n; ++r) {
        const bool fail = latent[r] == Outcome::Fail;
        for (std::size_t f = 0; f < cfg.rates.size(); ++f) {
            d.features(r, f) = static_cast<double>(rng.poisson(fail ? cfg.rates[f].first : cfg.rates[f].second));
        }
        d.labels.push_back(rng.bernoulli(cfg.label_noise) ? flip(latent[r]) : latent[r]);
    }
    return d;
}

}  // namespace mooc::synth
