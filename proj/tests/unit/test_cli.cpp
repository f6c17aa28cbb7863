#include "aquarius/cli.hpp"
#include "aquarius/event_log.hpp"
#include "aquarius/simulator.hpp"

#include "../support/support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using testing_support::run;
using testing_support::temp_dir;
using nlohmann::json;

namespace {

struct fixture_run {
    temp_dir dir;
    std::string data = (dir / "data").string();
    std::string log = (dir / "events.jsonl").string();

    fixture_run() {
        EXPECT_EQ(run({"fixture", "--out", data}).code, 0);
        const auto r = run({"ingest", data + "/studies.jsonl", data + "/findings.jsonl",
                            data + "/reports.jsonl", "--log", log});
        EXPECT_EQ(r.code, 0) << r.err;
    }
    auto adjudicate_all() -> testing_support::cli_result {
        return run({"adjudicate", "--script", data + "/adjudications.jsonl", "--log", log});
    }
};

}  // namespace

TEST(Cli, FixtureFlowPrintsReferenceRates) {
    fixture_run f;
    const auto blocked = run({"metrics", "--log", f.log});
    EXPECT_EQ(blocked.code, aquarius::cli::exit_invalid);
    EXPECT_NE(blocked.err.find("29"), std::string::npos) << blocked.err;
    EXPECT_NE(blocked.err.find("IncompleteAdjudication"), std::string::npos);

    const auto adj = f.adjudicate_all();
    EXPECT_EQ(adj.code, 0) << adj.err;

    const auto table = run({"metrics", "--log", f.log});
    EXPECT_EQ(table.code, 0) << table.err;
    EXPECT_NE(table.out.find("0.5263%"), std::string::npos) << table.out;
    EXPECT_NE(table.out.find("2.6178%"), std::string::npos) << table.out;
    EXPECT_NE(table.out.find("98.5021%"), std::string::npos) << table.out;

    const auto js = run({"metrics", "--log", f.log, "--format", "json"});
    ASSERT_EQ(js.code, 0);
    const auto m = json::parse(js.out);
    EXPECT_EQ(m["cohort_size"], 1936);
    EXPECT_EQ(m["queue_size"], 29);
    EXPECT_NEAR(m["effort_reduction"].get<double>(), 0.985021, 1e-6);

    const temp_dir out;
    const auto written = run({"metrics", "--log", f.log, "--out", (out / "m.json").string()});
    EXPECT_EQ(written.code, 0);
    EXPECT_EQ(json::parse(testing_support::read_text(out / "m.json")), m);

    // Re-running the script is a no-op.
    EXPECT_EQ(f.adjudicate_all().code, 0);
    EXPECT_EQ(run({"metrics", "--log", f.log, "--format", "json"}).out, js.out);
}

TEST(Cli, QueueFormats) {
    fixture_run f;
    const auto table = run({"queue", "--log", f.log});
    EXPECT_EQ(table.code, 0);
    EXPECT_NE(table.out.find("29 pending"), std::string::npos);
    const auto j = run({"queue", "--log", f.log, "--format", "json", "--arm", "flagged"});
    ASSERT_EQ(j.code, 0) << j.err;
    const auto items = json::parse(j.out);
    EXPECT_EQ(items.size(), 12U);
    for (const auto& item : items) EXPECT_EQ(item["arm"], "flagged");
    EXPECT_EQ(run({"queue", "--log", f.log, "--format", "yaml"}).code, aquarius::cli::exit_usage);
}

TEST(Cli, SingleAdjudication) {
    fixture_run f;
    const auto first = json::parse(run({"queue", "--log", f.log, "--format", "json"}).out)[0];
    const auto id = first["study_id"].get<std::string>();
    EXPECT_EQ(run({"adjudicate", "--log", f.log, "--study", id, "--outcome",
                   "AI_FALSE_POSITIVE"})
                  .code,
              0);
    const auto again =
        run({"adjudicate", "--log", f.log, "--study", id, "--outcome", "OTHER"});
    EXPECT_EQ(again.code, aquarius::cli::exit_invalid);
    EXPECT_NE(again.err.find("AlreadyAdjudicated"), std::string::npos) << again.err;
    EXPECT_EQ(run({"adjudicate", "--log", f.log, "--study", id, "--outcome", "OTHER", "--amend"})
                  .code,
              0);
    const auto unknown =
        run({"adjudicate", "--log", f.log, "--study", "NOPE", "--outcome", "OTHER"});
    EXPECT_EQ(unknown.code, aquarius::cli::exit_invalid);
    EXPECT_NE(unknown.err.find("UnknownItem"), std::string::npos);
}

TEST(Cli, ReplayDetectsSeqGap) {
    fixture_run f;
    EXPECT_EQ(run({"replay", "--log", f.log}).code, 0);
    auto text = testing_support::read_text(f.log);
    // Remove line 5 (seq 5).
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) pos = text.find('\n', pos) + 1;
    text.erase(pos, text.find('\n', pos) + 1 - pos);
    testing_support::write_text(f.log, text);
    const auto r = run({"replay", "--log", f.log});
    EXPECT_EQ(r.code, aquarius::cli::exit_invalid);
    EXPECT_NE(r.err.find("seq 5"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("CorruptLog"), std::string::npos) << r.err;
}

TEST(Cli, IngestRejectionsExitNonZero) {
    temp_dir dir;
    testing_support::write_text(
        dir / "findings.jsonl",
        R"({"study_id":"A","finding_code":"ICH","ai_positive":true,"ai_score":1.7,"model_version":"m","received_at":"2021-01-04T07:05:00Z"})"
        "\n");
    const auto r = run({"ingest", (dir / "findings.jsonl").string(), "--log",
                        (dir / "ev.jsonl").string()});
    EXPECT_EQ(r.code, aquarius::cli::exit_invalid);
    EXPECT_NE((r.out + r.err).find("rejected 1"), std::string::npos) << r.out << r.err;
}

TEST(Cli, SimulateAndBaseline) {
    temp_dir dir;
    const auto out = (dir / "sim").string();
    const auto sim = run({"simulate", "--out", out, "--n", "600", "--seed", "cli"});
    ASSERT_EQ(sim.code, 0) << sim.err;
    EXPECT_EQ(aquarius::sim::read_sidecar(dir / "sim/sidecar.jsonl").size(), 600U);
    const auto base = run({"simulate", "--baseline", out + "/sidecar.jsonl", "--review-fraction",
                           "0.1", "--trials", "500"});
    ASSERT_EQ(base.code, 0) << base.err;
    const auto j = json::parse(base.out);
    EXPECT_EQ(j["sample_size"], 60);
    EXPECT_EQ(j["trials"], 500);
    EXPECT_EQ(run({"simulate", "--out", out, "--ai-positive-rate", "2"}).code,
              aquarius::cli::exit_invalid);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, aquarius::cli::exit_usage);
    EXPECT_EQ(run({"metrics", "--no-such-flag"}).code, aquarius::cli::exit_usage);
    EXPECT_EQ(run({"adjudicate", "--log", "/tmp/x.jsonl"}).code, aquarius::cli::exit_usage);
    const auto help = run({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("ingest"), std::string::npos);
}
