#include "mooc/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mooc/csv.hpp"
#include "mooc/error.hpp"
#include "mooc/learn/dataset.hpp"
#include "mooc/learn/selection.hpp"

namespace mooc {

namespace {

std::filesystem::path resolve(const KeyValueConfig& kv, const std::string& key, const std::string& fallback = "") {
    const std::string value = kv.get_string(key, fallback);
    if (value.empty()) return {};
    std::filesystem::path p(value);
    if (p.is_relative()) p = kv.base_dir() / p;
    return p.lexically_normal();
}

std::size_t get_size(const KeyValueConfig& kv, const std::string& key, std::size_t fallback) {
    return static_cast<std::size_t>(kv.get_u64(key, fallback));
}

std::ofstream open_output(const PipelineConfig& cfg, const char* name) {
    std::filesystem::create_directories(cfg.out);
    const auto path = cfg.out / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void require_file(const std::filesystem::path& p, const char* what) {
    if (p.empty()) throw Error(std::string("config: no ") + what + " file given");
    if (!std::filesystem::is_regular_file(p)) throw Error(std::string(what) + " file not found: " + p.string());
}

std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

nlohmann::json metrics_json(const learn::Metrics& m) {
    nlohmann::json j;
    j["accuracy"] = m.accuracy;
    j["recall"] = m.recall ? nlohmann::json(*m.recall) : nlohmann::json(nullptr);
    return j;
}

SequenceSet sequences_for(const Cohort& cohort, const PipelineConfig& cfg) {
    return build_sequences(cohort, DiscretizeOptions{cfg.order});
}

}  // namespace

void PipelineConfig::validate() const {
    if (groups < 1) throw Error("config: groups must be positive");
    if (!(order.low < order.high)) throw Error("config: order.low must be below order.high");
    mooc::validate(mining);
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error("config: learn.train_fraction must be in (0, 1)");
    if (forest.trees == 0) throw Error("config: learn.rf.trees must be positive");
    if (mlp.hidden.empty()) throw Error("config: learn.mlp.hidden needs at least one layer");
    for (auto w : mlp.hidden) {
        if (w == 0) throw Error("config: learn.mlp.hidden widths must be positive");
    }
    if (mlp.batch_size == 0) throw Error("config: learn.mlp.batch_size must be positive");
    if (!(mlp.learning_rate > 0.0) || !(baselines.logistic.learning_rate > 0.0) || !(baselines.svm.learning_rate > 0.0)) {
        throw Error("config: learning rates must be positive");
    }
}

PipelineConfig pipeline_config_from(const KeyValueConfig& kv) {
    PipelineConfig cfg;
    cfg.submissions = resolve(kv, "submissions");
    cfg.outcomes = resolve(kv, "outcomes");
    cfg.grouping = resolve(kv, "grouping");
    cfg.taxonomy = resolve(kv, "taxonomy");
    cfg.out = resolve(kv, "out", "out");
    cfg.groups = static_cast<int>(kv.get_int("groups", cfg.groups));
    cfg.order.low = kv.get_double("order.low", cfg.order.low);
    cfg.order.high = kv.get_double("order.high", cfg.order.high);

    cfg.mining.min_recall = kv.get_double("mine.min_recall", cfg.mining.min_recall);
    cfg.mining.min_accuracy = kv.get_double("mine.min_accuracy", cfg.mining.min_accuracy);
    cfg.mining.max_pattern_length = get_size(kv, "mine.max_length", cfg.mining.max_pattern_length);
    if (auto v = kv.get("mine.interior")) cfg.mining.gap_policy.interior = parse_interior(*v);
    if (auto v = kv.get("mine.boundary")) cfg.mining.gap_policy.boundary = parse_boundary(*v);

    cfg.seed = kv.get_u64("learn.seed", cfg.seed);
    cfg.train_fraction = kv.get_double("learn.train_fraction", cfg.train_fraction);
    cfg.forest.trees = get_size(kv, "learn.rf.trees", cfg.forest.trees);
    cfg.forest.max_depth = get_size(kv, "learn.rf.max_depth", cfg.forest.max_depth);
    cfg.forest.min_samples_split = get_size(kv, "learn.rf.min_samples_split", cfg.forest.min_samples_split);
    cfg.forest.max_features = get_size(kv, "learn.rf.max_features", cfg.forest.max_features);

    if (kv.has("learn.mlp.hidden")) {
        cfg.mlp.hidden.clear();
        for (auto w : kv.get_int_list("learn.mlp.hidden", {})) {
            if (w <= 0) throw Error("config: learn.mlp.hidden widths must be positive");
            cfg.mlp.hidden.push_back(static_cast<std::size_t>(w));
        }
    }
    cfg.mlp.learning_rate = kv.get_double("learn.mlp.learning_rate", cfg.mlp.learning_rate);
    cfg.mlp.momentum = kv.get_double("learn.mlp.momentum", cfg.mlp.momentum);
    cfg.mlp.epochs = get_size(kv, "learn.mlp.epochs", cfg.mlp.epochs);
    cfg.mlp.batch_size = get_size(kv, "learn.mlp.batch_size", cfg.mlp.batch_size);
    cfg.mlp.l2 = kv.get_double("learn.mlp.l2", cfg.mlp.l2);

    auto& lr = cfg.baselines.logistic;
    lr.learning_rate = kv.get_double("learn.lr.learning_rate", lr.learning_rate);
    lr.epochs = get_size(kv, "learn.lr.epochs", lr.epochs);
    lr.l2 = kv.get_double("learn.lr.l2", lr.l2);
    auto& svm = cfg.baselines.svm;
    svm.learning_rate = kv.get_double("learn.svm.learning_rate", svm.learning_rate);
    svm.epochs = get_size(kv, "learn.svm.epochs", svm.epochs);
    svm.l2 = kv.get_double("learn.svm.l2", svm.l2);

    cfg.validate();
    return cfg;
}

Cohort load_cohort(const PipelineConfig& cfg) {
    require_file(cfg.submissions, "submissions");
    require_file(cfg.outcomes, "outcomes");
    require_file(cfg.grouping, "grouping");
    return assemble_cohort(load_submissions(cfg.submissions), load_outcomes(cfg.outcomes),
                           load_grouping(cfg.grouping, cfg.groups));
}

DiagnosticTaxonomy load_pipeline_taxonomy(const PipelineConfig& cfg) {
    if (cfg.taxonomy.empty()) return default_taxonomy();
    require_file(cfg.taxonomy, "taxonomy");
    return load_taxonomy(cfg.taxonomy);
}

// ---------------------------------------------------------------------------

std::vector<KindPatterns> mine_all(const SequenceSet& set, const MiningConfig& cfg) {
    std::vector<KindPatterns> out;
    for (auto kind : kAllKinds) {
        const auto fail = set.select(kind, Outcome::Fail);
        const auto pass = set.select(kind, Outcome::Pass);
        if (fail.empty() || pass.empty()) {
            throw Error(std::string("mine: the ") + (fail.empty() ? "Fail" : "Pass") + " class has no students");
        }
        out.push_back({kind, mine(fail, pass, cfg)});
    }
    return out;
}

void write_pattern_file(std::ostream& out, const std::vector<KindPatterns>& mined) {
    write_patterns_header(out);
    for (const auto& k : mined) write_patterns(out, k.patterns);
}

// ---------------------------------------------------------------------------

PredictionRun predict(const Cohort& cohort, const DiagnosticTaxonomy& tax, const PipelineConfig& cfg) {
    PredictionRun run;
    run.features = extract_features(cohort, tax);
    const auto data = learn::make_dataset(cohort, run.features, tax);
    if (data.count(Outcome::Fail) == 0 || data.count(Outcome::Pass) == 0) {
        throw Error("predict: the cohort contains a single class");
    }

    const auto [train, test] = learn::split(data, cfg.train_fraction, cfg.seed);
    const auto forest = learn::RandomForest::fit(train, cfg.forest, cfg.seed);
    run.importance = learn::rf_importance(forest);

    const auto selection =
        learn::forward_select(data, run.importance, learn::mlp_trainer(cfg.mlp), cfg.seed, cfg.train_fraction);
    const auto train_sel = train.select_columns(selection.selected_indices);
    const auto test_sel = test.select_columns(selection.selected_indices);

    nlohmann::json models;
    for (auto kind : {learn::BaselineKind::NaiveBayes, learn::BaselineKind::LogisticRegression,
                      learn::BaselineKind::LinearSvm}) {
        models[std::string(learn::to_string(kind))] =
            metrics_json(learn::baseline_fit_predict(kind, train_sel, test_sel, cfg.seed, cfg.baselines));
    }
    const auto mlp = learn::mlp_fit(train_sel, cfg.mlp, cfg.seed);
    models["mlp"] = metrics_json(learn::evaluate(learn::mlp_predict(mlp, test_sel.features).labels, test_sel.labels));

    auto& m = run.metrics;
    m["models"] = std::move(models);
    m["selected_features"] = selection.selected;
    m["selection_trajectory"] = selection.trajectory;
    m["forest_oob_accuracy"] =
        forest.oob_accuracy() ? nlohmann::json(*forest.oob_accuracy()) : nlohmann::json(nullptr);
    m["seeds"] = {{"split", cfg.seed}, {"forest", cfg.seed}, {"mlp", cfg.seed}, {"linear_svm", cfg.seed}};
    m["split"] = {{"train_fraction", cfg.train_fraction},
                  {"train", train.size()},
                  {"test", test.size()},
                  {"train_fail", train.count(Outcome::Fail)},
                  {"test_fail", test.count(Outcome::Fail)}};
    m["config"] = {
        {"forest",
         {{"trees", cfg.forest.trees},
          {"max_depth", cfg.forest.max_depth},
          {"min_samples_split", cfg.forest.min_samples_split},
          {"max_features", cfg.forest.max_features}}},
        {"mlp",
         {{"hidden", cfg.mlp.hidden},
          {"learning_rate", cfg.mlp.learning_rate},
          {"momentum", cfg.mlp.momentum},
          {"epochs", cfg.mlp.epochs},
          {"batch_size", cfg.mlp.batch_size},
          {"l2", cfg.mlp.l2}}},
        {"logistic_regression",
         {{"learning_rate", cfg.baselines.logistic.learning_rate},
          {"epochs", cfg.baselines.logistic.epochs},
          {"l2", cfg.baselines.logistic.l2}}},
        {"linear_svm",
         {{"learning_rate", cfg.baselines.svm.learning_rate},
          {"epochs", cfg.baselines.svm.epochs},
          {"l2", cfg.baselines.svm.l2}}},
    };
    m["students"] = data.size();
    return run;
}

void write_importance(std::ostream& out, const learn::ImportanceRanking& ranking) {
    csv::write_row(out, {"feature", "importance"});
    for (const auto& e : ranking.entries) csv::write_row(out, {e.name, fixed6(e.importance)});
}

// ---------------------------------------------------------------------------

std::size_t grade_band(double score) {
    if (score < 60.0) return 0;
    if (score >= 90.0) return 4;
    return static_cast<std::size_t>(std::floor(score / 10.0)) - 5;
}

int modal_order_symbol(const FeatureSequence& order) {
    if (order.kind != SequenceKind::Order) throw Error("modal_order_symbol: not an order sequence");
    std::array<std::size_t, 3> counts{};
    for (int s : order.symbols) {
        if (s < 1 || s > 3) throw Error("modal_order_symbol: symbol out of range");
        ++counts[static_cast<std::size_t>(s - 1)];
    }
    int best = 3;
    for (int s = 2; s >= 1; --s) {
        if (counts[static_cast<std::size_t>(s - 1)] > counts[static_cast<std::size_t>(best - 1)]) best = s;
    }
    return best;
}

OrderGradeTable order_vs_grade(const Cohort& cohort, const SequenceSet& set) {
    if (set.students.size() != cohort.size()) throw Error("report: sequences do not cover the cohort");
    OrderGradeTable table{};
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        const int symbol = modal_order_symbol(set.students[i].order);
        ++table[static_cast<std::size_t>(symbol - 1)][grade_band(cohort.score(i))];
    }
    return table;
}

void write_order_vs_grade(std::ostream& out, const OrderGradeTable& table) {
    csv::write_row(out, {"order_symbol", "grade_band", "count"});
    for (std::size_t s = 0; s < table.size(); ++s) {
        for (std::size_t b = 0; b < kGradeBands.size(); ++b) {
            if (table[s][b] == 0) continue;
            csv::write_row(out, {std::to_string(s + 1), kGradeBands[b], std::to_string(table[s][b])});
        }
    }
}

// ---------------------------------------------------------------------------

void run_sequences(const PipelineConfig& cfg) {
    const auto set = sequences_for(load_cohort(cfg), cfg);
    auto out = open_output(cfg, "sequences.csv");
    write_sequences(out, set);
}

void run_mine(const PipelineConfig& cfg) {
    const auto mined = mine_all(sequences_for(load_cohort(cfg), cfg), cfg.mining);
    auto out = open_output(cfg, "patterns.csv");
    write_pattern_file(out, mined);
}

void run_predict(const PipelineConfig& cfg) {
    const auto tax = load_pipeline_taxonomy(cfg);
    const auto run = predict(load_cohort(cfg), tax, cfg);
    {
        auto out = open_output(cfg, "features.csv");
        write_features(out, run.features, tax);
    }
    {
        auto out = open_output(cfg, "importance.csv");
        write_importance(out, run.importance);
    }
    auto out = open_output(cfg, "metrics.json");
    out << run.metrics.dump(2) << '\n';
}

void run_report(const PipelineConfig& cfg) {
    const auto cohort = load_cohort(cfg);
    const auto table = order_vs_grade(cohort, sequences_for(cohort, cfg));
    auto out = open_output(cfg, "order_vs_grade.csv");
    write_order_vs_grade(out, table);
}

void run_all(const PipelineConfig& cfg) {
    const auto cohort = load_cohort(cfg);
    const auto tax = load_pipeline_taxonomy(cfg);
    const auto set = sequences_for(cohort, cfg);
    // Compute everything before writing so a failing stage leaves no partial run.
    const auto mined = mine_all(set, cfg.mining);
    const auto run = predict(cohort, tax, cfg);
    const auto table = order_vs_grade(cohort, set);
    {
        auto out = open_output(cfg, "sequences.csv");
        write_sequences(out, set);
    }
    {
        auto out = open_output(cfg, "patterns.csv");
        write_pattern_file(out, mined);
    }
    {
        auto out = open_output(cfg, "features.csv");
        write_features(out, run.features, tax);
    }
    {
        auto out = open_output(cfg, "importance.csv");
        write_importance(out, run.importance);
    }
    {
        auto out = open_output(cfg, "metrics.json");
        out << run.metrics.dump(2) << '\n';
    }
    auto out = open_output(cfg, "order_vs_grade.csv");
    write_order_vs_grade(out, table);
}

}  // namespace mooc
