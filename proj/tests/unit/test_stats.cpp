#include "aquarius/error.hpp"
#include "aquarius/metrics_export.hpp"
#include "aquarius/pipeline.hpp"
#include "aquarius/simulator.hpp"
#include "aquarius/stats.hpp"

#include "../oracles/fisher_oracle.hpp"
#include "../oracles/recount_oracle.hpp"
#include "../oracles/wilson_oracle.hpp"
#include "../support/support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace aquarius;
using namespace aquarius::stats;

namespace {

auto code_of(auto&& f) -> std::optional<error_code> {
    try {
        f();
    } catch (const error& e) {
        return e.code();
    }
    return std::nullopt;
}

auto adjudicated_fixture() -> ingest::pipeline {
    ingest::pipeline p;
    const auto bundle = sim::reference_fixture();
    testing_support::load_bundle(p, bundle);
    testing_support::apply_script(p, bundle);
    return p;
}

}  // namespace

TEST(Fisher, KnownTables) {
    EXPECT_DOUBLE_EQ(fisher_exact_2x2(0, 10, 0, 10), 1.0);
    EXPECT_NEAR(fisher_exact_2x2(10, 0, 0, 10), 1.0825088224469026e-05, 1e-15);
    EXPECT_NEAR(fisher_exact_2x2(1, 9, 11, 3), 0.0027594561852200836, 1e-14);
    const double p = fisher_exact_2x2(1, 189, 5, 186);
    EXPECT_GT(p, 0.05);
    EXPECT_NEAR(p, oracle::fisher_two_sided(1, 189, 5, 186), 1e-10 * p);
    EXPECT_EQ(code_of([] { (void)fisher_exact_2x2(0, 0, 0, 0); }), error_code::invalid_counts);
}

TEST(Fisher, MatchesOracleProperty) {
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<std::size_t> cell(0, 60);
    for (int i = 0; i < 1000; ++i) {
        const auto a = cell(gen), b = cell(gen), c = cell(gen), d = cell(gen);
        if (a + b + c + d == 0) continue;
        const double expected = oracle::fisher_two_sided(a, b, c, d);
        const double got = fisher_exact_2x2(a, b, c, d);
        EXPECT_NEAR(got, expected, 1e-10 * std::max(expected, 1e-300) + 1e-15)
            << a << " " << b << " " << c << " " << d;
        EXPECT_GE(got, 0.0);
        EXPECT_LE(got, 1.0);
    }
}

TEST(Fisher, SymmetryProperty) {
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<std::size_t> cell(0, 200);
    for (int i = 0; i < 1000; ++i) {
        const auto a = cell(gen), b = cell(gen), c = cell(gen), d = cell(gen) + 1;
        const double p = fisher_exact_2x2(a, b, c, d);
        EXPECT_NEAR(fisher_exact_2x2(c, d, a, b), p, 1e-12 * p + 1e-300);  // rows
        EXPECT_NEAR(fisher_exact_2x2(b, a, d, c), p, 1e-12 * p + 1e-300);  // columns
        EXPECT_NEAR(fisher_exact_2x2(a, c, b, d), p, 1e-12 * p + 1e-300);  // transpose
    }
}

TEST(Wilson, MatchesOracle) {
    std::mt19937_64 gen(8);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 1 + gen() % 5000;
        const std::size_t k = gen() % (n + 1);
        const double z = i % 3 == 0 ? 1.96 : 0.5 + (gen() % 300) / 100.0;
        const auto got = wilson_interval(k, n, z);
        const auto want = oracle::wilson(k, n, z);
        EXPECT_NEAR(got.lo, want.first, 1e-9);
        EXPECT_NEAR(got.hi, want.second, 1e-9);
        EXPECT_LE(got.lo, static_cast<double>(k) / n + 1e-12);
        EXPECT_GE(got.hi, static_cast<double>(k) / n - 1e-12);
    }
}

TEST(Wilson, Endpoints) {
    const auto zero = wilson_interval(0, 50, 1.96);
    EXPECT_DOUBLE_EQ(zero.lo, 0.0);
    EXPECT_GT(zero.hi, 0.0);
    const auto all = wilson_interval(50, 50, 1.96);
    EXPECT_DOUBLE_EQ(all.hi, 1.0);
    EXPECT_LT(all.lo, 1.0);
    EXPECT_EQ(code_of([] { (void)wilson_interval(0, 0, 1.96); }), error_code::invalid_counts);
    EXPECT_EQ(code_of([] { (void)wilson_interval(6, 5, 1.96); }), error_code::invalid_counts);
    EXPECT_EQ(code_of([] { (void)wilson_interval(1, 5, 0.0); }), error_code::invalid_counts);
}

TEST(Wilson, WidthShrinksWithN) {
    double previous = 1.0;
    for (std::size_t n = 10; n <= 100000; n *= 10) {
        const auto i = wilson_interval(n / 10, n, 1.96);
        EXPECT_LT(i.hi - i.lo, previous);
        previous = i.hi - i.lo;
    }
}

TEST(Effort, Examples) {
    EXPECT_NEAR(effort_reduction(29, 1936), 0.985021, 1e-6);
    EXPECT_DOUBLE_EQ(effort_reduction(0, 10), 1.0);
    EXPECT_DOUBLE_EQ(effort_reduction(10, 10), 0.0);
    EXPECT_EQ(code_of([] { (void)effort_reduction(0, 0); }), error_code::zero_cohort);
}

TEST(MissedRate, FixtureRates) {
    const auto p = adjudicated_fixture();
    EXPECT_NEAR(missed_rate(arm::flagged, p.state(), rate_basis::ai_positive), 1.0 / 190, 1e-9);
    EXPECT_NEAR(missed_rate(arm::nonflagged, p.state(), rate_basis::ai_positive), 5.0 / 191,
                1e-9);
    const auto f = tally(p.state(), arm::flagged);
    EXPECT_EQ(f.ai_positive, 190U);
    EXPECT_EQ(f.missed, 1U);
    EXPECT_EQ(f.pending, 0U);
}

TEST(MissedRate, PendingItemsBlock) {
    ingest::pipeline p;
    testing_support::load_bundle(p, sim::reference_fixture());
    EXPECT_EQ(code_of([&] { (void)missed_rate(arm::flagged, p.state(), rate_basis::ai_positive); }),
              error_code::incomplete_adjudication);
    try {
        (void)compute_metrics(p.state(), {});
        ADD_FAILURE();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), error_code::incomplete_adjudication);
        EXPECT_NE(std::string(e.what()).find("29"), std::string::npos);
    }
    EXPECT_EQ(summarize(p.state()).pending, 29U);
}

TEST(MissedRate, ZeroDenominator) {
    ingest::pipeline p;
    testing_support::load_bundle(
        p, sim::generate_cohort({.n_studies = 30, .ai_positive_rate = 0.0, .seed = "zero"}));
    EXPECT_EQ(code_of([&] { (void)missed_rate(arm::flagged, p.state(), rate_basis::ai_positive); }),
              error_code::zero_denominator);
    const auto m = compute_metrics(p.state(), {});
    EXPECT_DOUBLE_EQ(m.missed_rate_flagged, 0.0);
    EXPECT_EQ(m.ci_flagged, (interval{0.0, 1.0}));
    EXPECT_DOUBLE_EQ(m.effort_reduction, 1.0);
}

TEST(Metrics, AllConcordantCohort) {
    ingest::pipeline p;
    testing_support::load_bundle(
        p, sim::generate_cohort({.n_studies = 200, .nlp_neg_given_ai_pos = 0.0, .seed = "conc"}));
    const auto m = compute_metrics(p.state(), {});
    EXPECT_EQ(m.queue_size, 0U);
    EXPECT_DOUBLE_EQ(m.effort_reduction, 1.0);
    EXPECT_DOUBLE_EQ(m.missed_rate_flagged, 0.0);
    EXPECT_DOUBLE_EQ(m.missed_rate_nonflagged, 0.0);
    EXPECT_DOUBLE_EQ(m.p_value, 1.0);
}

TEST(Metrics, FixtureTable) {
    const auto p = adjudicated_fixture();
    const auto m = compute_metrics(p.state(), {});
    EXPECT_EQ(m.cohort_size, 1936U);
    EXPECT_EQ(m.ai_positive_total, 381U);
    EXPECT_EQ(m.queue_size, 29U);
    EXPECT_NEAR(m.effort_reduction, 0.985021, 1e-6);
    EXPECT_NEAR(m.p_value, oracle::fisher_two_sided(1, 189, 5, 186), 1e-10);
    const auto ci = oracle::wilson(1, 190, 1.96);
    EXPECT_NEAR(m.ci_flagged.lo, ci.first, 1e-9);
    EXPECT_NEAR(m.ci_flagged.hi, ci.second, 1e-9);

    const auto table = render_metrics_table(m);
    EXPECT_NE(table.find("0.5263%"), std::string::npos);
    EXPECT_NE(table.find("2.6178%"), std::string::npos);
    EXPECT_EQ(format_percent(1.0 / 190, 4), "0.5263%");

    const auto confirmed = compute_metrics(p.state(), {}, rate_basis::confirmed_positive);
    EXPECT_EQ(confirmed.denominator_flagged, 182U);
    EXPECT_EQ(confirmed.denominator_nonflagged, 182U);
}

TEST(Metrics, SimulatedCohortsMatchRecount) {
    for (int i = 0; i < 12; ++i) {
        testing_support::temp_dir dir;
        const auto log = dir / "events.jsonl";
        sim::sim_params params;
        params.n_studies = 150 + 50 * i;
        params.ai_positive_rate = 0.1 + 0.05 * i;
        params.nlp_neg_given_ai_pos = 0.05 + 0.02 * i;
        params.seed = "recount-" + std::to_string(i);
        const auto bundle = sim::generate_cohort(params);
        {
            auto p = ingest::pipeline::open({}, log, testing_support::fixed_clock());
            testing_support::load_bundle(p, bundle);
            testing_support::apply_script(p, bundle);
        }
        const auto state = ingest::replay(log).state;
        const auto r = oracle::recount_events(oracle::read_log_lines(log.string()));
        ASSERT_EQ(r.pending, 0U);
        for (auto basis : {rate_basis::ai_positive, rate_basis::confirmed_positive}) {
            const auto m = compute_metrics(state, {}, basis);
            EXPECT_EQ(m.cohort_size, r.cohort);
            EXPECT_EQ(m.queue_size, r.queue);
            EXPECT_DOUBLE_EQ(m.effort_reduction, r.effort());
            const bool ai = basis == rate_basis::ai_positive;
            EXPECT_DOUBLE_EQ(m.missed_rate_flagged, ai ? r.rate_ai_positive(1) : r.rate_confirmed(1));
            EXPECT_DOUBLE_EQ(m.missed_rate_nonflagged,
                             ai ? r.rate_ai_positive(0) : r.rate_confirmed(0));
            for (double v : {m.missed_rate_flagged, m.missed_rate_nonflagged, m.effort_reduction,
                             m.p_value, m.ci_flagged.lo, m.ci_flagged.hi}) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
        }
    }
}
