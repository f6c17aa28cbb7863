#include "aquarius/error.hpp"
#include "aquarius/event_log.hpp"
#include "aquarius/pipeline.hpp"
#include "aquarius/simulator.hpp"
#include "aquarius/triage.hpp"

#include "../support/support.hpp"

#include <gtest/gtest.h>

using namespace aquarius;
using namespace aquarius::triage;

namespace {

const auto t0 = timestamp::parse("2021-01-04T07:00:00Z");

auto adj(const std::string& id, adjudication_outcome o, bool amend = false) -> adjudication {
    return {id, "rev", o, std::nullopt, t0 + std::chrono::hours(1), amend};
}

auto expect_code(error_code code, auto&& f) {
    try {
        f();
        ADD_FAILURE() << "expected " << to_string(code);
    } catch (const error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

}  // namespace

TEST(Concordance, Mapping) {
    EXPECT_EQ(concordance(true, nlp_label_value::negative), concordance_class::ai_pos_nlp_neg);
    EXPECT_EQ(concordance(true, nlp_label_value::positive), concordance_class::ai_pos_nlp_pos);
    EXPECT_EQ(concordance(false, nlp_label_value::negative), concordance_class::ai_neg_nlp_neg);
    EXPECT_EQ(concordance(false, nlp_label_value::positive), concordance_class::ai_neg_nlp_pos);
}

TEST(Enqueue, DefaultScopeTakesAiPosNlpNeg) {
    triage_queue q;
    const trial::trial_config defaults;
    EXPECT_TRUE(q.enqueue_if_discordant("a", concordance_class::ai_pos_nlp_neg, defaults, t0));
    EXPECT_FALSE(q.enqueue_if_discordant("b", concordance_class::ai_neg_nlp_pos, defaults, t0));
    EXPECT_FALSE(q.enqueue_if_discordant("c", concordance_class::ai_pos_nlp_pos, defaults, t0));
    EXPECT_EQ(q.items().size(), 1U);
}

TEST(Enqueue, AllDiscordantModeTakesBoth) {
    triage_queue q;
    trial::trial_config all;
    all.scope = review_scope::all_discordant;
    EXPECT_TRUE(q.enqueue_if_discordant("b", concordance_class::ai_neg_nlp_pos, all, t0));
    EXPECT_FALSE(q.enqueue_if_discordant("d", concordance_class::ai_neg_nlp_neg, all, t0));
}

TEST(Enqueue, Idempotent) {
    triage_queue q;
    const trial::trial_config cfg;
    const auto first = q.enqueue_if_discordant("a", concordance_class::ai_pos_nlp_neg, cfg, t0);
    const auto again = q.enqueue_if_discordant("a", concordance_class::ai_pos_nlp_neg, cfg,
                                               t0 + std::chrono::hours(5));
    ASSERT_TRUE(first && again);
    EXPECT_EQ(*first, *again);
    EXPECT_EQ(q.items().size(), 1U);
}

TEST(Adjudication, StateTransitionAndErrors) {
    triage_queue q;
    q.enqueue_if_discordant("a", concordance_class::ai_pos_nlp_neg, {}, t0);
    const auto item = q.record_adjudication(adj("a", adjudication_outcome::true_positive_missed));
    EXPECT_EQ(item.status(), triage_status::adjudicated);
    expect_code(error_code::unknown_item,
                [&] { q.record_adjudication(adj("zzz", adjudication_outcome::other)); });
    expect_code(error_code::already_adjudicated,
                [&] { q.record_adjudication(adj("a", adjudication_outcome::other)); });
    // Amendments append and become effective.
    q.record_adjudication(adj("a", adjudication_outcome::other, true));
    EXPECT_EQ(q.effective_adjudication("a")->outcome, adjudication_outcome::other);
    EXPECT_EQ(q.history("a").size(), 2U);
}

TEST(Adjudication, RestatingIsRepeat) {
    triage_queue q;
    q.enqueue_if_discordant("a", concordance_class::ai_pos_nlp_neg, {}, t0);
    q.record_adjudication(adj("a", adjudication_outcome::ai_false_positive));
    EXPECT_TRUE(q.is_repeat(adj("a", adjudication_outcome::ai_false_positive)));
    EXPECT_FALSE(q.is_repeat(adj("a", adjudication_outcome::other)));
}

TEST(PendingQueue, EmptyCohort) { EXPECT_TRUE(pending_queue(cohort_state{}).empty()); }

TEST(PendingQueue, FixtureBeforeAndAfterAdjudication) {
    const auto bundle = sim::reference_fixture();
    ingest::pipeline p;
    testing_support::load_bundle(p, bundle);
    const auto all = pending_queue(p.state());
    EXPECT_EQ(all.size(), 29U);
    for (std::size_t i = 1; i < all.size(); ++i) {
        EXPECT_LE(all[i - 1].enqueued_at(), all[i].enqueued_at());
    }

    const auto flagged = pending_queue(p.state(), {.flagged = true});
    const auto nonflagged = pending_queue(p.state(), {.flagged = false});
    EXPECT_EQ(flagged.size(), 12U);
    EXPECT_EQ(nonflagged.size(), 17U);
    for (const auto& item : flagged) {
        EXPECT_TRUE(p.state().assignments.at(item.study_id()).flagged);
    }
    EXPECT_TRUE(pending_queue(p.state(), {.concordance = concordance_class::ai_neg_nlp_pos}).empty());

    testing_support::apply_script(p, bundle);
    EXPECT_TRUE(pending_queue(p.state()).empty());

    // Outcome conservation.
    std::map<adjudication_outcome, int> counts;
    for (const auto& [id, item] : p.state().triage.items()) {
        counts[p.state().triage.effective_adjudication(id)->outcome]++;
    }
    EXPECT_EQ(counts[adjudication_outcome::reported_nlp_error], 6);
    EXPECT_EQ(counts[adjudication_outcome::true_positive_missed], 6);
    EXPECT_EQ(counts[adjudication_outcome::ai_false_positive], 17);
    EXPECT_EQ(counts[adjudication_outcome::other], 0);
}

TEST(PendingQueue, ReplayTwiceYieldsSameQueue) {
    testing_support::temp_dir dir;
    const auto log = dir / "log.jsonl";
    const auto bundle = sim::reference_fixture();
    {
        auto p = ingest::pipeline::open({}, log);
        testing_support::load_bundle(p, bundle);
        for (std::size_t i = 0; i < 10; ++i) p.adjudicate(bundle.script[i]);
    }
    const auto a = ingest::replay(log).state;
    const auto b = ingest::replay(log).state;
    EXPECT_EQ(a, b);
    EXPECT_EQ(pending_queue(a), pending_queue(b));
    EXPECT_EQ(pending_queue(a).size(), 19U);
}

TEST(Staleness, SupersedingReportRetiresItem) {
    ingest::pipeline p;
    p.ingest(study_record{"s", t0, "CT-1", "HEAD_CT_NONCONTRAST"});
    p.ingest(ai_finding{"s", "ICH", true, 0.9, "m", t0, std::nullopt});
    p.ingest(report_document{"s", "No hemorrhage.", t0 + std::chrono::hours(1)});
    ASSERT_EQ(pending_queue(p.state()).size(), 1U);
    p.ingest(report_document{"s", "Addendum: small subdural hematoma.", t0 + std::chrono::hours(3)});
    EXPECT_TRUE(pending_queue(p.state()).empty());
    EXPECT_NE(p.state().triage.find("s"), nullptr);
    expect_code(error_code::unknown_item,
                [&] { p.adjudicate(adj("s", adjudication_outcome::other)); });
}

TEST(Properties, QueueBoundedByDiscordantStudies) {
    for (int seed = 0; seed < 20; ++seed) {
        sim::sim_params params;
        params.n_studies = 300;
        params.nlp_neg_given_ai_pos = 0.3;
        params.seed = "bound-" + std::to_string(seed);
        params.trial.scope = seed % 2 ? review_scope::all_discordant
                                      : review_scope::ai_pos_nlp_neg_only;
        ingest::pipeline p({params.trial, nlp::default_lexicon()});
        testing_support::load_bundle(p, sim::generate_cohort(params));
        std::size_t discordant = 0;
        for (const auto& [id, f] : p.state().findings) {
            const auto c = p.state().concordance_of(id);
            ASSERT_TRUE(c.has_value());
            discordant += is_discordant(*c) ? 1 : 0;
        }
        const auto queue = pending_queue(p.state());
        EXPECT_LE(queue.size(), discordant);
        for (const auto& item : queue) {
            EXPECT_TRUE(is_discordant(*p.state().concordance_of(item.study_id())));
        }
    }
}
