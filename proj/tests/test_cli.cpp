#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

#include "mooc/csv.hpp"
#include "mooc/error.hpp"
#include "mooc/pipeline.hpp"
#include "mooc/synth.hpp"

using namespace mooc;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = MOOC_FIXTURES;

struct Run {
    int status;
    std::string err;
};

Run cli(const std::string& args, const testing::TempDir& scratch) {
    const auto err = scratch / "stderr.txt";
    const std::string cmd = std::string("\"") + MOOC_CLI + "\" " + args + " > /dev/null 2> \"" + err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, testing::slurp(err)};
}

std::string pipeline_cfg(const fs::path& cohort, const std::string& extra = "") {
    return "submissions = " + (cohort / "submissions.csv").string() + "\noutcomes = " +
           (cohort / "outcomes.csv").string() + "\ngrouping = " + (cohort / "grouping.csv").string() + "\n" + extra;
}

// Synthetic cohort with a planted order pattern and a strong compile signal.
fs::path make_cohort(const testing::TempDir& dir, std::size_t students = 80) {
    synth::SynthConfig cfg;
    cfg.seed = 77;
    cfg.n_students = students;
    cfg.fail_fraction = 0.5;
    cfg.planted.push_back({parse_pattern("(*)3(*)3(*)", SequenceKind::Order), 1.0, 0.0});
    cfg.compile_signal.push_back({"Syntax error", 8.0, 0.2});
    cfg.compile_signal.push_back({"Undeclared", 1.0, 1.0});
    const auto path = dir / "cohort";
    synth::write_cohort_files(synth::gen_cohort(cfg), path);
    return path;
}

}  // namespace

TEST_CASE("sequences matches the hand-computed golden file") {
    testing::TempDir t("cli_seq");
    const auto r = cli("sequences --config \"" + (kFixtures / "hand/pipeline.cfg").string() + "\" --out \"" +
                           t.path().string() + "\"",
                       t);
    CHECK(r.status == 0);
    CHECK(r.err.empty());
    CHECK(testing::slurp(t / "sequences.csv") == testing::slurp(kFixtures / "hand/expected_sequences.csv"));

    // Global flags also work after the subcommand.
    testing::TempDir u("cli_seq_after");
    CHECK(cli("--out \"" + u.path().string() + "\" sequences --config \"" +
                  (kFixtures / "hand/pipeline.cfg").string() + "\"",
              u)
              .status == 0);
    CHECK(testing::slurp(u / "sequences.csv") == testing::slurp(kFixtures / "hand/expected_sequences.csv"));
}

TEST_CASE("report matches the hand tally") {
    testing::TempDir t("cli_report");
    const auto r = cli("report --config \"" + (kFixtures / "hand/pipeline.cfg").string() + "\" --out \"" +
                           t.path().string() + "\"",
                       t);
    CHECK(r.status == 0);
    CHECK(testing::slurp(t / "order_vs_grade.csv") == testing::slurp(kFixtures / "hand/expected_order_vs_grade.csv"));
}

TEST_CASE("empty submissions file gives zero-activity sequences") {
    testing::TempDir t("cli_empty");
    testing::spit(t / "submissions.csv",
                  "student_id,assignment_id,timestamp,submission_order,plagiarism_flag,compile_status,diagnostic_text\n");
    testing::spit(t / "outcomes.csv", "student_id,final_score\nx,40\ny,90\n");
    testing::spit(t / "grouping.csv", "assignment_id,group_index\na1,1\na2,2\na3,3\n");
    testing::spit(t / "run.cfg", pipeline_cfg(t.path(), "groups = 3\nout = out\n"));
    const auto r = cli("sequences --config \"" + (t / "run.cfg").string() + "\"", t);
    CHECK(r.status == 0);
    CHECK(testing::slurp(t / "out/sequences.csv") ==
          "student_id,kind,s1,s2,s3\n"
          "x,times,-2,-2,-2\nx,order,1,1,1\nx,plagiarism,0,0,0\n"
          "y,times,-2,-2,-2\ny,order,1,1,1\ny,plagiarism,0,0,0\n");
}

TEST_CASE("load errors exit nonzero with a message") {
    testing::TempDir t("cli_err");
    const auto hand = kFixtures / "hand";
    testing::spit(t / "run.cfg", "submissions = " + (hand / "submissions.csv").string() + "\noutcomes = " +
                                     (hand / "outcomes.csv").string() + "\ngrouping = " +
                                     (t / "missing.csv").string() + "\ngroups = 2\nout = out\n");
    auto r = cli("sequences --config \"" + (t / "run.cfg").string() + "\"", t);
    CHECK(r.status != 0);
    CHECK(r.err.find("missing.csv") != std::string::npos);
    CHECK_FALSE(fs::exists(t / "out/sequences.csv"));

    r = cli("sequences", t);
    CHECK(r.status != 0);
    r = cli("sequences --config \"" + (t / "nope.cfg").string() + "\"", t);
    CHECK(r.status != 0);
    r = cli("frobnicate", t);
    CHECK(r.status != 0);

    testing::spit(t / "bad.cfg", pipeline_cfg(kFixtures / "hand", "groups = 2\nmine.min_recall = lots\n"));
    r = cli("mine --config \"" + (t / "bad.cfg").string() + "\"", t);
    CHECK(r.status != 0);
    CHECK(r.err.find("mine.min_recall") != std::string::npos);
}

TEST_CASE("mine: planted pattern, thresholds above one, determinism") {
    testing::TempDir t("cli_mine");
    const auto cohort = make_cohort(t, 40);
    testing::spit(t / "run.cfg", pipeline_cfg(cohort, "mine.max_length = 4\n"));
    const auto cfg = (t / "run.cfg").string();

    REQUIRE(cli("mine --config \"" + cfg + "\" --out \"" + (t / "a").string() + "\"", t).status == 0);
    REQUIRE(cli("mine --config \"" + cfg + "\" --out \"" + (t / "b").string() + "\"", t).status == 0);
    const auto text = testing::slurp(t / "a/patterns.csv");
    CHECK(text == testing::slurp(t / "b/patterns.csv"));

    // Stats for the planted row must equal the brute-force oracle's.
    const auto cohort_data = load_cohort(pipeline_config_from(KeyValueConfig::load(cfg)));
    const auto set = build_sequences(cohort_data);
    MiningConfig mc;
    mc.max_pattern_length = 4;
    const auto fail = set.select(SequenceKind::Order, Outcome::Fail);
    const auto pass = set.select(SequenceKind::Order, Outcome::Pass);
    std::ostringstream expected;
    write_patterns(expected, synth::oracle_mine(fail, pass, mc));
    CHECK(text.find(expected.str()) != std::string::npos);
    CHECK(text.find("order,(*)3(*)3(*),1.0000,1.0000,20,0\n") != std::string::npos);

    testing::spit(t / "strict.cfg", pipeline_cfg(cohort, "mine.min_recall = 1.01\nmine.min_accuracy = 1.01\n"));
    REQUIRE(cli("mine --config \"" + (t / "strict.cfg").string() + "\" --out \"" + (t / "c").string() + "\"", t)
                .status == 0);
    CHECK(testing::slurp(t / "c/patterns.csv") == "kind,pattern,accuracy,recall,fail_matches,pass_matches\n");
}

TEST_CASE("mine and predict reject a single-class cohort") {
    testing::TempDir t("cli_single");
    testing::spit(t / "submissions.csv",
                  "student_id,assignment_id,timestamp,submission_order,plagiarism_flag,compile_status,diagnostic_text\n"
                  "x,a1,2019-03-01T00:00:00Z,1,0,ok,\ny,a1,2019-03-01T00:01:00Z,2,0,ok,\n"
                  "x,a2,2019-03-01T00:00:00Z,1,0,ok,\ny,a2,2019-03-01T00:01:00Z,2,0,ok,\n"
                  "x,a3,2019-03-01T00:00:00Z,1,0,ok,\ny,a3,2019-03-01T00:01:00Z,2,0,ok,\n");
    testing::spit(t / "outcomes.csv", "student_id,final_score\nx,80\ny,90\n");
    testing::spit(t / "grouping.csv", "assignment_id,group_index\na1,1\na2,2\na3,3\n");
    testing::spit(t / "run.cfg", pipeline_cfg(t.path(), "groups = 3\n"));
    for (const char* cmd : {"mine", "predict", "run-all"}) {
        const auto r = cli(std::string(cmd) + " --config \"" + (t / "run.cfg").string() + "\" --out \"" +
                               (t / "out").string() + "\"",
                           t);
        CAPTURE(cmd);
        CHECK(r.status != 0);
        CHECK(r.err.find("class") != std::string::npos);
    }
    CHECK_FALSE(fs::exists(t / "out"));
}

TEST_CASE("predict writes four models and is repeatable") {
    testing::TempDir t("cli_predict");
    const auto cohort = make_cohort(t);
    testing::spit(t / "run.cfg", pipeline_cfg(cohort, "learn.seed = 5\n"));
    const auto cfg = (t / "run.cfg").string();
    REQUIRE(cli("predict --config \"" + cfg + "\" --out \"" + (t / "a").string() + "\"", t).status == 0);
    REQUIRE(cli("predict --config \"" + cfg + "\" --out \"" + (t / "b").string() + "\"", t).status == 0);
    const auto text = testing::slurp(t / "a/metrics.json");
    CHECK(text == testing::slurp(t / "b/metrics.json"));
    CHECK(testing::slurp(t / "a/importance.csv") == testing::slurp(t / "b/importance.csv"));

    const auto m = nlohmann::json::parse(text);
    REQUIRE(m["models"].size() == 4);
    for (const char* model : {"naive_bayes", "logistic_regression", "linear_svm", "mlp"}) {
        CAPTURE(model);
        REQUIRE(m["models"].contains(model));
        CHECK(m["models"][model]["accuracy"].get<double>() >= 0.0);
    }
    CHECK(m["models"]["mlp"]["accuracy"].get<double>() >= 0.95);
    CHECK(m["seeds"]["split"] == 5);
    CHECK(m["selected_features"][0] == "Syntax error");
    CHECK(m["split"]["train"].get<int>() + m["split"]["test"].get<int>() == 80);

    // --seed overrides learn.seed.
    REQUIRE(cli("predict --seed 9 --config \"" + cfg + "\" --out \"" + (t / "c").string() + "\"", t).status == 0);
    CHECK(nlohmann::json::parse(testing::slurp(t / "c/metrics.json"))["seeds"]["mlp"] == 9);

    std::istringstream imp(testing::slurp(t / "a/importance.csv"));
    csv::Reader reader(imp, "importance.csv");
    csv::Row row;
    std::size_t rows = 0;
    while (reader.next(row)) ++rows;
    CHECK(rows == 24);  // header plus 23 features
}

TEST_CASE("synth subcommand and run-all") {
    testing::TempDir t("cli_synth");
    testing::spit(t / "synth.cfg",
                  "seed = 4\nstudents = 60\nplanted.a.kind = times\nplanted.a.pattern = (*)2(*)2(*)\n"
                  "compile.s.category = Syntax error\ncompile.s.fail_rate = 5\ncompile.s.pass_rate = 0.5\n");
    REQUIRE(cli("synth --config \"" + (t / "synth.cfg").string() + "\" --out \"" + (t / "c1").string() + "\"", t)
                .status == 0);
    REQUIRE(cli("synth --config \"" + (t / "synth.cfg").string() + "\" --out \"" + (t / "c2").string() + "\"", t)
                .status == 0);
    REQUIRE(cli("synth --seed 5 --config \"" + (t / "synth.cfg").string() + "\" --out \"" + (t / "c3").string() +
                    "\"",
                t)
                .status == 0);
    for (const char* f : {"submissions.csv", "outcomes.csv", "grouping.csv", "manifest.json"}) {
        CHECK(testing::slurp(t / "c1" / f) == testing::slurp(t / "c2" / f));
    }
    CHECK(testing::slurp(t / "c1/submissions.csv") != testing::slurp(t / "c3/submissions.csv"));
    CHECK(nlohmann::json::parse(testing::slurp(t / "c1/manifest.json"))["planted"][0]["fail_carriers"] == 24);

    testing::spit(t / "run.cfg", pipeline_cfg(t / "c1", "out = run1\n"));
    REQUIRE(cli("run-all --config \"" + (t / "run.cfg").string() + "\"", t).status == 0);
    for (const char* f : {"sequences.csv", "patterns.csv", "features.csv", "importance.csv", "metrics.json",
                          "order_vs_grade.csv"}) {
        CAPTURE(f);
        CHECK(fs::exists(t / "run1" / f));
    }
}

TEST_CASE("report edge cases") {
    testing::TempDir t("cli_report_edges");
    testing::spit(t / "submissions.csv",
                  "student_id,assignment_id,timestamp,submission_order,plagiarism_flag,compile_status,diagnostic_text\n");
    testing::spit(t / "outcomes.csv", "student_id,final_score\n");
    testing::spit(t / "grouping.csv", "assignment_id,group_index\na1,1\n");
    testing::spit(t / "run.cfg", pipeline_cfg(t.path(), "groups = 1\nout = out\n"));
    REQUIRE(cli("report --config \"" + (t / "run.cfg").string() + "\"", t).status == 0);
    CHECK(testing::slurp(t / "out/order_vs_grade.csv") == "order_symbol,grade_band,count\n");

    // Everyone late and failing.
    std::string subs =
        "student_id,assignment_id,timestamp,submission_order,plagiarism_flag,compile_status,diagnostic_text\n";
    std::string outcomes = "student_id,final_score\n";
    for (int i = 0; i < 5; ++i) {
        subs += "s" + std::to_string(i) + ",a1,2019-03-01T00:00:00Z," + std::to_string(2000 + i) + ",0,ok,\n";
        outcomes += "s" + std::to_string(i) + "," + std::to_string(10 * i) + "\n";
    }
    testing::spit(t / "submissions.csv", subs);
    testing::spit(t / "outcomes.csv", outcomes);
    REQUIRE(cli("report --config \"" + (t / "run.cfg").string() + "\"", t).status == 0);
    CHECK(testing::slurp(t / "out/order_vs_grade.csv") == "order_symbol,grade_band,count\n3,<60,5\n");
}

TEST_CASE("report helpers") {
    CHECK(grade_band(0) == 0);
    CHECK(grade_band(59.99) == 0);
    CHECK(grade_band(60) == 1);
    CHECK(grade_band(69.5) == 1);
    CHECK(grade_band(70) == 2);
    CHECK(grade_band(89.99) == 3);
    CHECK(grade_band(90) == 4);
    CHECK(grade_band(100) == 4);

    CHECK(modal_order_symbol({SequenceKind::Order, {1, 1, 2}}) == 1);
    CHECK(modal_order_symbol({SequenceKind::Order, {1, 2, 2, 1}}) == 2);  // tie goes to the higher symbol
    CHECK(modal_order_symbol({SequenceKind::Order, {1, 3, 2}}) == 3);
    CHECK_THROWS(modal_order_symbol({SequenceKind::Times, {1}}));
}

TEST_CASE("pipeline config") {
    std::istringstream in(
        "submissions = data/s.csv\noutcomes = /abs/o.csv\ngrouping = g.csv\ngroups = 7\n"
        "mine.interior = zero_or_more\nmine.boundary = free\nmine.max_length = 3\n"
        "learn.mlp.hidden = 8, 4\nlearn.rf.trees = 10\nlearn.seed = 123\n");
    auto kv = KeyValueConfig::parse(in, "/base/dir/run.cfg");
    const auto cfg = pipeline_config_from(kv);
    CHECK(cfg.groups == 7);
    CHECK(cfg.mining.gap_policy.interior == GapPolicy::Interior::ZeroOrMore);
    CHECK(cfg.mining.gap_policy.boundary == GapPolicy::Boundary::Free);
    CHECK(cfg.mining.max_pattern_length == 3);
    CHECK(cfg.mlp.hidden == std::vector<std::size_t>{8, 4});
    CHECK(cfg.forest.trees == 10);
    CHECK(cfg.seed == 123);
    CHECK(cfg.outcomes == fs::path("/abs/o.csv"));

    std::istringstream bad("learn.train_fraction = 1.5\n");
    CHECK_THROWS(pipeline_config_from(KeyValueConfig::parse(bad)));
    std::istringstream bad_policy("mine.interior = sometimes\n");
    CHECK_THROWS(pipeline_config_from(KeyValueConfig::parse(bad_policy)));
}
