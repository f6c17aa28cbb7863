#include "aquarius/stats.hpp"

#include "aquarius/cohort_state.hpp"
#include "aquarius/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace aquarius::stats {

auto to_string(arm a) -> std::string_view {
    return a == arm::flagged ? "flagged" : "non-flagged";
}

auto tally(const cohort_state& state, arm a) -> arm_tally {
    const bool want_flagged = a == arm::flagged;
    arm_tally t;
    for (const auto& [id, assignment] : state.assignments) {
        if (assignment.flagged != want_flagged) {
            continue;
        }
        ++t.ai_positive;
        if (auto l = state.labels.find(id);
            l != state.labels.end() && l->second.label == nlp_label_value::positive) {
            ++t.nlp_positive;
        }
        const auto* item = state.triage.find(id);
        if (!item || !state.is_live(*item)) {
            continue;
        }
        ++t.queued;
        if (item->status() == triage_status::pending) {
            ++t.pending;
            continue;
        }
        if (const auto* adj = state.triage.effective_adjudication(id)) {
            if (adj->outcome == adjudication_outcome::true_positive_missed) {
                ++t.missed;
            } else if (adj->outcome == adjudication_outcome::reported_nlp_error) {
                ++t.reported_nlp_error;
            }
        }
    }
    return t;
}

auto summarize(const cohort_state& state) -> cohort_summary {
    cohort_summary s;
    s.cohort_size = state.studies.size();
    for (const auto& [id, f] : state.findings) {
        if (f.ai_positive && state.studies.contains(id)) {
            ++s.ai_positive_total;
        }
    }
    for (const auto& [id, a] : state.assignments) {
        ++(a.flagged ? s.flagged_count : s.nonflagged_count);
    }
    for (const auto& item : state.live_items()) {
        ++s.queue_size;
        if (item.status() == triage_status::pending) {
            ++s.pending;
        }
    }
    return s;
}

auto missed_rate(arm a, const cohort_state& state, rate_basis basis) -> double {
    const auto t = tally(state, a);
    if (t.pending > 0) {
        throw error(error_code::incomplete_adjudication,
                    std::to_string(t.pending) + " cases pending in the " +
                        std::string(to_string(a)) + " arm");
    }
    const auto denominator = t.denominator(basis);
    if (denominator == 0) {
        throw error(error_code::zero_denominator,
                    "no " + std::string(aquarius::to_string(basis)) + " cases in the " +
                        std::string(to_string(a)) + " arm");
    }
    return static_cast<double>(t.missed) / static_cast<double>(denominator);
}

auto effort_reduction(std::size_t queue_size, std::size_t cohort_size) -> double {
    if (cohort_size == 0) {
        throw error(error_code::zero_cohort, "effort reduction of an empty cohort");
    }
    return 1.0 - static_cast<double>(queue_size) / static_cast<double>(cohort_size);
}

auto wilson_interval(std::size_t successes, std::size_t n, double z) -> interval {
    if (n == 0 || successes > n || !(z > 0.0) || !std::isfinite(z)) {
        throw error(error_code::invalid_counts,
                    "wilson interval needs 0 <= successes <= n, n > 0, z > 0");
    }
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    interval out{std::clamp(center - half, 0.0, 1.0), std::clamp(center + half, 0.0, 1.0)};
    // The closed form is exact at the boundaries; remove rounding residue.
    if (successes == 0) {
        out.lo = 0.0;
    }
    if (successes == n) {
        out.hi = 1.0;
    }
    return out;
}

namespace {

auto log_choose(std::size_t n, std::size_t k) -> double {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

auto fisher_exact_2x2(std::size_t a, std::size_t b, std::size_t c, std::size_t d) -> double {
    const std::size_t row1 = a + b;
    const std::size_t row2 = c + d;
    const std::size_t col1 = a + c;
    const std::size_t n = row1 + row2;
    if (n == 0) {
        throw error(error_code::invalid_counts, "fisher test on an empty table");
    }

    // Cell a ranges over [lo, hi] with all margins fixed.
    const std::size_t lo = col1 > row2 ? col1 - row2 : 0;
    const std::size_t hi = std::min(row1, col1);
    const double log_total = log_choose(n, col1);
    auto log_p = [&](std::size_t x) {
        return log_choose(row1, x) + log_choose(row2, col1 - x) - log_total;
    };

    std::vector<double> logs;
    logs.reserve(hi - lo + 1);
    for (std::size_t x = lo; x <= hi; ++x) {
        logs.push_back(log_p(x));
    }
    const double observed = log_p(a);
    const double cutoff = observed + std::log1p(1e-12);

    // Sum in probability space relative to the mode for stability.
    const double peak = *std::max_element(logs.begin(), logs.end());
    double kept = 0.0;
    double all = 0.0;
    for (double lp : logs) {
        const double w = std::exp(lp - peak);
        all += w;
        if (lp <= cutoff) {
            kept += w;
        }
    }
    return std::clamp(kept / all, 0.0, 1.0);
}

auto compute_metrics(const cohort_state& state, const trial::trial_config& config,
                     std::optional<rate_basis> basis, double z) -> qa_metrics {
    const auto summary = summarize(state);
    if (summary.pending > 0) {
        throw error(error_code::incomplete_adjudication,
                    std::to_string(summary.pending) + " cases pending adjudication");
    }

    qa_metrics m;
    m.basis = basis.value_or(config.basis);
    m.z = z;
    m.cohort_size = summary.cohort_size;
    m.ai_positive_total = summary.ai_positive_total;
    m.flagged_count = summary.flagged_count;
    m.nonflagged_count = summary.nonflagged_count;
    m.queue_size = summary.queue_size;
    m.effort_reduction =
        summary.cohort_size == 0 ? 1.0 : effort_reduction(summary.queue_size, summary.cohort_size);

    const auto flagged = tally(state, arm::flagged);
    const auto nonflagged = tally(state, arm::nonflagged);
    m.missed_flagged = flagged.missed;
    m.missed_nonflagged = nonflagged.missed;
    m.denominator_flagged = flagged.denominator(m.basis);
    m.denominator_nonflagged = nonflagged.denominator(m.basis);

    auto rate_and_ci = [&](std::size_t missed, std::size_t denominator, double& rate,
                           interval& ci) {
        if (denominator == 0) {
            rate = 0.0;
            ci = interval{0.0, 1.0};
            return;
        }
        rate = static_cast<double>(missed) / static_cast<double>(denominator);
        ci = wilson_interval(missed, denominator, z);
    };
    rate_and_ci(m.missed_flagged, m.denominator_flagged, m.missed_rate_flagged, m.ci_flagged);
    rate_and_ci(m.missed_nonflagged, m.denominator_nonflagged, m.missed_rate_nonflagged,
                m.ci_nonflagged);

    const auto total = m.denominator_flagged + m.denominator_nonflagged;
    m.p_value = total == 0 ? 1.0
                           : fisher_exact_2x2(m.missed_flagged,
                                              m.denominator_flagged - m.missed_flagged,
                                              m.missed_nonflagged,
                                              m.denominator_nonflagged - m.missed_nonflagged);
    return m;
}

}  // namespace aquarius::stats
