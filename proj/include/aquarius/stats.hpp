/**
 * @file stats.hpp
 * @brief Arm-stratified QA metrics, Wilson intervals and Fisher's exact test
 */

#pragma once

#include "aquarius/randomizer.hpp"
#include "aquarius/types.hpp"

#include <cstddef>
#include <optional>

namespace aquarius {
struct cohort_state;
}

namespace aquarius::stats {

enum class arm { flagged, nonflagged };

[[nodiscard]] auto to_string(arm a) -> std::string_view;

/// Raw per-arm counts over live triage items and AI-positive assignments.
struct arm_tally {
    std::size_t ai_positive = 0;
    std::size_t nlp_positive = 0;        ///< AI-positive studies whose report is NLP-positive
    std::size_t missed = 0;              ///< TRUE_POSITIVE_MISSED
    std::size_t reported_nlp_error = 0;  ///< REPORTED_NLP_ERROR
    std::size_t queued = 0;
    std::size_t pending = 0;

    [[nodiscard]] auto denominator(rate_basis basis) const -> std::size_t {
        return basis == rate_basis::ai_positive ? ai_positive
                                                : nlp_positive + missed + reported_nlp_error;
    }

    auto operator==(const arm_tally&) const -> bool = default;
};

[[nodiscard]] auto tally(const cohort_state& state, arm a) -> arm_tally;

/// Counts that do not require a fully adjudicated queue.
struct cohort_summary {
    std::size_t cohort_size = 0;
    std::size_t ai_positive_total = 0;
    std::size_t flagged_count = 0;
    std::size_t nonflagged_count = 0;
    std::size_t queue_size = 0;
    std::size_t pending = 0;

    auto operator==(const cohort_summary&) const -> bool = default;
};

[[nodiscard]] auto summarize(const cohort_state& state) -> cohort_summary;

/**
 * @brief Missed-detection rate of one arm.
 *
 * Numerator: TRUE_POSITIVE_MISSED adjudications in the arm. Denominator:
 * AI-positive studies in the arm (AI_POSITIVE), or NLP-positive plus
 * TRUE_POSITIVE_MISSED plus REPORTED_NLP_ERROR studies (CONFIRMED_POSITIVE).
 * Throws error(incomplete_adjudication) if the arm has pending items and
 * error(zero_denominator) when the denominator is zero.
 */
[[nodiscard]] auto missed_rate(arm a, const cohort_state& state, rate_basis basis) -> double;

/// 1 - queue/cohort. Throws error(zero_cohort) for an empty cohort.
[[nodiscard]] auto effort_reduction(std::size_t queue_size, std::size_t cohort_size) -> double;

/**
 * @brief Wilson score interval for successes/n, clamped to [0,1].
 *
 * Throws error(invalid_counts) unless 0 <= successes <= n, n > 0 and z > 0.
 */
[[nodiscard]] auto wilson_interval(std::size_t successes, std::size_t n, double z) -> interval;

/**
 * @brief Two-sided Fisher exact p-value for the table [[a, b], [c, d]].
 *
 * Sums the hypergeometric probabilities of every table with the observed
 * margins that is no more probable than the observed one (relative
 * tolerance 1e-12). Throws error(invalid_counts) when the table is empty.
 */
[[nodiscard]] auto fisher_exact_2x2(std::size_t a, std::size_t b, std::size_t c, std::size_t d)
    -> double;

/**
 * @brief Assembles QAMetrics for a fully adjudicated cohort.
 *
 * `basis` overrides the configured rate basis. The p-value tests
 * (missed, not missed) x (flagged, non-flagged) under that basis. An arm with
 * a zero denominator reports rate 0 with the vacuous interval [0,1].
 * Throws error(incomplete_adjudication) naming the pending count.
 */
[[nodiscard]] auto compute_metrics(const cohort_state& state, const trial::trial_config& config,
                                   std::optional<rate_basis> basis = std::nullopt,
                                   double z = 1.96) -> qa_metrics;

}  // namespace aquarius::stats
