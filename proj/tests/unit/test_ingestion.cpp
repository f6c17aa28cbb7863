#include "aquarius/error.hpp"
#include "aquarius/event_log.hpp"
#include "aquarius/pipeline.hpp"
#include "aquarius/simulator.hpp"
#include "aquarius/triage.hpp"

#include "../oracles/recount_oracle.hpp"
#include "../support/support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace aquarius;
using namespace aquarius::ingest;
using testing_support::temp_dir;

namespace {

const auto t0 = timestamp::parse("2021-01-04T07:00:00Z");

const char* const three_findings =
    R"({"study_id":"A","finding_code":"ICH","ai_positive":true,"ai_score":0.91,"model_version":"m","received_at":"2021-01-04T07:05:00Z"})"
    "\n"
    R"({"study_id":"B","finding_code":"ICH","ai_positive":false,"ai_score":0.02,"model_version":"m","received_at":"2021-01-04T07:20:00Z"})"
    "\n"
    R"({"study_id":"C","finding_code":"ICH","ai_positive":true,"model_version":"m","received_at":"2021-01-04T07:35:00Z"})"
    "\n";

auto write_fixture_log(const temp_dir& dir) -> std::filesystem::path {
    const auto log = dir / "events.jsonl";
    auto p = pipeline::open({}, log, testing_support::fixed_clock());
    testing_support::load_bundle(p, sim::reference_fixture());
    return log;
}

auto lines_of(const std::string& text) -> std::vector<std::string> {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST(IngestFile, ThreeFindingsThenDuplicates) {
    temp_dir dir;
    const auto path = dir / "findings.jsonl";
    testing_support::write_text(path, three_findings);
    pipeline p;
    const auto first = p.ingest_file(path, record_kind::finding);
    EXPECT_EQ(first.accepted, 3U);
    EXPECT_EQ(first.duplicates, 0U);
    EXPECT_EQ(first.rejected, 0U);
    const auto again = p.ingest_file(path, record_kind::finding);
    EXPECT_EQ(again.accepted, 0U);
    EXPECT_EQ(again.duplicates, 3U);
    EXPECT_EQ(p.state().findings.size(), 3U);
}

TEST(IngestFile, OutOfRangeScoreRejectedWithLineNumber) {
    std::istringstream in(
        std::string(three_findings) +
        R"({"study_id":"D","finding_code":"ICH","ai_positive":true,"ai_score":1.7,"model_version":"m","received_at":"2021-01-04T07:50:00Z"})"
        "\n{broken\n");
    pipeline p;
    const auto s = p.ingest_lines(in, record_kind::finding);
    EXPECT_EQ(s.accepted, 3U);
    EXPECT_EQ(s.rejected, 2U);
    ASSERT_EQ(s.errors.size(), 2U);
    EXPECT_EQ(s.errors[0].line, 4U);
    EXPECT_NE(s.errors[0].message.find("ai_score"), std::string::npos);
    EXPECT_EQ(s.errors[1].line, 5U);
    EXPECT_FALSE(p.state().findings.contains("D"));
}

TEST(IngestFile, MissingFileIsIoError) {
    pipeline p;
    try {
        (void)p.ingest_file("/nonexistent/findings.jsonl", record_kind::finding);
        ADD_FAILURE();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), error_code::io_error);
    }
}

TEST(IngestFile, KindFromPath) {
    EXPECT_EQ(record_kind_from_path("x/studies.jsonl"), record_kind::study);
    EXPECT_EQ(record_kind_from_path("AI-Results-2021.jsonl"), record_kind::finding);
    EXPECT_EQ(record_kind_from_path("reports.jsonl"), record_kind::report);
    EXPECT_EQ(record_kind_from_path("adjudications.jsonl"), std::nullopt);
}

TEST(Duplicates, ConflictingRecordsAreRejected) {
    pipeline p;
    EXPECT_EQ(p.ingest(study_record{"s", t0, "CT-1", "HEAD_CT_NONCONTRAST"}).status,
              ingest_status::accepted);
    EXPECT_EQ(p.ingest(study_record{"s", t0, "CT-2", "HEAD_CT_NONCONTRAST"}).status,
              ingest_status::rejected);
    const ai_finding f{"s", "ICH", true, 0.9, "m", t0, std::nullopt};
    p.ingest(f);
    auto changed = f;
    changed.ai_positive = false;
    const auto r = p.ingest(changed);
    EXPECT_EQ(r.status, ingest_status::rejected);
    EXPECT_NE(r.message.find("conflicting"), std::string::npos);
    EXPECT_TRUE(p.state().findings.at("s").ai_positive);
    EXPECT_EQ(p.ingest(study_record{"x", t0, "CT-1", "MRI_BRAIN"}).status, ingest_status::rejected);
}

TEST(Reports, SupersessionRelabels) {
    pipeline p;
    p.ingest(study_record{"s", t0, "CT-1", "HEAD_CT_NONCONTRAST"});
    p.ingest(report_document{"s", "Acute subdural hematoma.", t0 + std::chrono::hours(1)});
    EXPECT_EQ(p.state().labels.at("s").label, nlp_label_value::positive);
    p.ingest(report_document{"s", "Corrected: no hemorrhage.", t0 + std::chrono::hours(2)});
    EXPECT_EQ(p.state().labels.at("s").label, nlp_label_value::negative);
    EXPECT_EQ(p.state().reports.at("s").size(), 2U);
    // An older version arriving late does not displace the final report.
    p.ingest(report_document{"s", "Prelim: possible hemorrhage.", t0 + std::chrono::minutes(30)});
    EXPECT_EQ(p.state().current_report("s")->text, "Corrected: no hemorrhage.");
    EXPECT_EQ(p.state().labels.at("s").label, nlp_label_value::negative);
    const auto clash =
        p.ingest(report_document{"s", "Something else.", t0 + std::chrono::hours(2)});
    EXPECT_EQ(clash.status, ingest_status::rejected);
}

TEST(Replay, EmptyAndMissingLogs) {
    temp_dir dir;
    EXPECT_TRUE(replay(dir / "absent.jsonl").events.empty());
    testing_support::write_text(dir / "empty.jsonl", "");
    const auto r = replay(dir / "empty.jsonl");
    EXPECT_TRUE(r.events.empty());
    EXPECT_EQ(r.state, cohort_state{});
    EXPECT_TRUE(triage::pending_queue(r.state).empty());
}

TEST(Replay, FixtureLogCounts) {
    temp_dir dir;
    const auto log = write_fixture_log(dir);
    const auto r = replay(log);
    EXPECT_EQ(r.state.studies.size(), 1936U);
    EXPECT_EQ(std::count_if(r.state.findings.begin(), r.state.findings.end(),
                            [](const auto& kv) { return kv.second.ai_positive; }),
              381);
    EXPECT_EQ(triage::pending_queue(r.state).size(), 29U);
    const auto recount = oracle::recount_events(oracle::read_log_lines(log.string()));
    EXPECT_EQ(recount.cohort, 1936U);
    EXPECT_EQ(recount.queue, 29U);
    EXPECT_EQ(recount.ai_positive[0] + recount.ai_positive[1], 381U);
}

TEST(Replay, SeqGapIsCorruptAndNamed) {
    temp_dir dir;
    const auto log = write_fixture_log(dir);
    auto lines = lines_of(testing_support::read_text(log));
    lines.erase(lines.begin() + 6);  // drops seq 7
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    testing_support::write_text(log, text);
    try {
        (void)replay(log);
        ADD_FAILURE();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), error_code::corrupt_log);
        EXPECT_NE(std::string(e.what()).find("seq 7"), std::string::npos) << e.what();
    }
}

TEST(Replay, GarbageMidLogIsCorrupt) {
    temp_dir dir;
    const auto log = write_fixture_log(dir);
    auto lines = lines_of(testing_support::read_text(log));
    lines[3] = "{garbage";
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    testing_support::write_text(log, text);
    EXPECT_THROW((void)replay(log), error);
}

TEST(Replay, PartialTailDroppedAndTruncatedOnReopen) {
    temp_dir dir;
    const auto log = write_fixture_log(dir);
    const auto full = replay(log);
    {
        std::ofstream out(log, std::ios::app | std::ios::binary);
        out << R"({"seq":99999,"kind":"STUDY_A)";
    }
    const auto r = replay(log);
    EXPECT_TRUE(r.dropped_partial_tail);
    EXPECT_EQ(r.events, full.events);
    {
        auto p = pipeline::open({}, log, testing_support::fixed_clock());
        p.ingest(study_record{"late", t0, "CT-1", "HEAD_CT_NONCONTRAST"});
    }
    const auto after = replay(log);
    EXPECT_FALSE(after.dropped_partial_tail);
    EXPECT_EQ(after.events.size(), full.events.size() + 1);
}

TEST(Replay, DeepEqualsLiveState) {
    temp_dir dir;
    const auto log = dir / "events.jsonl";
    const auto bundle = sim::reference_fixture();
    auto live = pipeline::open({}, log, testing_support::fixed_clock());
    testing_support::load_bundle(live, bundle);
    testing_support::apply_script(live, bundle);
    const auto r = replay(log);
    EXPECT_EQ(r.state, live.state());
    EXPECT_EQ(r.events, live.events());
    // Replaying the replayed events is idempotent.
    EXPECT_EQ(replay_events(r.events), r.state);
    EXPECT_EQ(replay(log).state, r.state);
}

TEST(Replay, ReopenContinuesTheLog) {
    temp_dir dir;
    const auto log = dir / "events.jsonl";
    const auto bundle = sim::reference_fixture();
    {
        auto p = pipeline::open({}, log, testing_support::fixed_clock());
        testing_support::load_bundle(p, bundle);
    }
    {
        auto p = pipeline::open({}, log, testing_support::fixed_clock());
        EXPECT_EQ(triage::pending_queue(p.state()).size(), 29U);
        testing_support::apply_script(p, bundle);
        // Re-ingesting everything appends nothing.
        const auto before = p.events().size();
        testing_support::load_bundle(p, bundle);
        EXPECT_EQ(p.events().size(), before);
    }
    const auto r = replay(log);
    EXPECT_TRUE(triage::pending_queue(r.state).empty());
    EXPECT_EQ(r.state.triage.items().size(), 29U);
}

TEST(Properties, IngestOrderDoesNotChangeState) {
    std::mt19937_64 gen(21);
    for (int round = 0; round < 25; ++round) {
        sim::sim_params params;
        params.n_studies = 80;
        params.ai_positive_rate = 0.4;
        params.nlp_neg_given_ai_pos = 0.3;
        params.seed = "perm-" + std::to_string(round);
        const auto bundle = sim::generate_cohort(params);

        pipeline ordered;
        testing_support::load_bundle(ordered, bundle);

        std::vector<std::function<void(pipeline&)>> steps;
        for (const auto& s : bundle.studies) steps.push_back([s](pipeline& p) { p.ingest(s); });
        for (const auto& f : bundle.findings) steps.push_back([f](pipeline& p) { p.ingest(f); });
        for (const auto& r : bundle.reports) steps.push_back([r](pipeline& p) { p.ingest(r); });
        std::shuffle(steps.begin(), steps.end(), gen);
        pipeline shuffled;
        for (const auto& step : steps) step(shuffled);

        EXPECT_EQ(shuffled.state(), ordered.state());
        EXPECT_EQ(triage::pending_queue(shuffled.state()), triage::pending_queue(ordered.state()));
    }
}

TEST(EventJson, RoundTrip) {
    temp_dir dir;
    const auto log = write_fixture_log(dir);
    for (const auto& e : replay(log).events) {
        EXPECT_EQ(nlohmann::json(e).get<event>(), e);
    }
}
