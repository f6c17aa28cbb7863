/**
 * @file types.hpp
 * @brief Shared domain types of the QA engine
 *
 * All values are plain immutable-by-convention aggregates: once constructed
 * and validated they are shared by const reference across threads.
 */

#pragma once

#include "aquarius/timestamp.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aquarius {

inline constexpr std::string_view default_finding_code = "ICH";
inline constexpr std::string_view default_exam_type = "HEAD_CT_NONCONTRAST";

/// One imaging study, the unit of QA.
struct study_record {
    std::string study_id;
    timestamp acquired_at;
    std::string scanner_id;
    std::string exam_type;

    auto operator==(const study_record&) const -> bool = default;
};

/// The image-analysis verdict for a study. ai_positive is authoritative.
struct ai_finding {
    std::string study_id;
    std::string finding_code;
    bool ai_positive = false;
    std::optional<double> ai_score;
    std::string model_version;
    timestamp received_at;
    /// Fixture-only arm override; takes precedence over the hash.
    std::optional<bool> flagged_override;

    auto operator==(const ai_finding&) const -> bool = default;
};

struct report_document {
    std::string study_id;
    std::string text;
    timestamp finalized_at;

    auto operator==(const report_document&) const -> bool = default;
};

struct byte_range {
    std::size_t start = 0;
    std::size_t end = 0;

    [[nodiscard]] constexpr auto size() const noexcept -> std::size_t { return end - start; }
    auto operator==(const byte_range&) const -> bool = default;
};

enum class polarity { affirmed, negated, uncertain };

struct evidence_span {
    std::size_t sentence_index = 0;
    byte_range range;
    std::string matched_term;
    aquarius::polarity polarity = aquarius::polarity::affirmed;

    auto operator==(const evidence_span&) const -> bool = default;
};

enum class nlp_label_value { positive, negative };

struct nlp_label {
    std::string study_id;
    nlp_label_value label = nlp_label_value::negative;
    std::vector<evidence_span> evidence;
    std::string classifier_version;
    /// finalized_at of the report version that was classified.
    timestamp report_finalized_at;

    auto operator==(const nlp_label&) const -> bool = default;
};

enum class assignment_source { hash, override };

struct arm_assignment {
    std::string study_id;
    bool flagged = false;
    std::string trial_seed;
    timestamp assigned_at;
    assignment_source source = assignment_source::hash;

    auto operator==(const arm_assignment&) const -> bool = default;
};

enum class concordance_class { ai_pos_nlp_pos, ai_pos_nlp_neg, ai_neg_nlp_pos, ai_neg_nlp_neg };

[[nodiscard]] constexpr auto is_discordant(concordance_class c) noexcept -> bool {
    return c == concordance_class::ai_pos_nlp_neg || c == concordance_class::ai_neg_nlp_pos;
}

enum class triage_status { pending, adjudicated };

/// A discordant study awaiting or having received expert review.
class triage_item {
public:
    triage_item() = default;

    /// Throws error(not_discordant) for a concordant class.
    triage_item(std::string study_id, concordance_class concordance, timestamp enqueued_at,
                triage_status status = triage_status::pending);

    [[nodiscard]] auto study_id() const noexcept -> const std::string& { return study_id_; }
    [[nodiscard]] auto concordance() const noexcept -> concordance_class { return concordance_; }
    [[nodiscard]] auto status() const noexcept -> triage_status { return status_; }
    [[nodiscard]] auto enqueued_at() const noexcept -> timestamp { return enqueued_at_; }

    [[nodiscard]] auto with_status(triage_status status) const -> triage_item {
        auto copy = *this;
        copy.status_ = status;
        return copy;
    }

    auto operator==(const triage_item&) const -> bool = default;

private:
    std::string study_id_;
    concordance_class concordance_ = concordance_class::ai_pos_nlp_neg;
    triage_status status_ = triage_status::pending;
    timestamp enqueued_at_;
};

enum class adjudication_outcome {
    true_positive_missed,
    reported_nlp_error,
    ai_false_positive,
    other,
};

struct adjudication {
    std::string study_id;
    std::string reviewer_id;
    adjudication_outcome outcome = adjudication_outcome::other;
    std::optional<std::string> note;
    timestamp decided_at;
    bool amendment = false;

    auto operator==(const adjudication&) const -> bool = default;
};

enum class rate_basis { ai_positive, confirmed_positive };
enum class review_scope { ai_pos_nlp_neg_only, all_discordant };

struct interval {
    double lo = 0.0;
    double hi = 1.0;

    auto operator==(const interval&) const -> bool = default;
};

struct qa_metrics {
    std::size_t cohort_size = 0;
    std::size_t ai_positive_total = 0;
    std::size_t flagged_count = 0;
    std::size_t nonflagged_count = 0;
    std::size_t queue_size = 0;
    std::size_t missed_flagged = 0;
    std::size_t missed_nonflagged = 0;
    std::size_t denominator_flagged = 0;
    std::size_t denominator_nonflagged = 0;
    double missed_rate_flagged = 0.0;
    double missed_rate_nonflagged = 0.0;
    rate_basis basis = rate_basis::ai_positive;
    double effort_reduction = 1.0;
    interval ci_flagged;
    interval ci_nonflagged;
    double p_value = 1.0;
    double z = 1.96;

    auto operator==(const qa_metrics&) const -> bool = default;
};

// Enumeration names used by every external format.
[[nodiscard]] auto to_string(polarity p) -> std::string_view;
[[nodiscard]] auto to_string(nlp_label_value v) -> std::string_view;
[[nodiscard]] auto to_string(assignment_source s) -> std::string_view;
[[nodiscard]] auto to_string(concordance_class c) -> std::string_view;
[[nodiscard]] auto to_string(triage_status s) -> std::string_view;
[[nodiscard]] auto to_string(adjudication_outcome o) -> std::string_view;
[[nodiscard]] auto to_string(rate_basis b) -> std::string_view;
[[nodiscard]] auto to_string(review_scope s) -> std::string_view;

// Parsers throw error(invalid_record) on unknown names.
[[nodiscard]] auto parse_polarity(std::string_view s) -> polarity;
[[nodiscard]] auto parse_nlp_label_value(std::string_view s) -> nlp_label_value;
[[nodiscard]] auto parse_assignment_source(std::string_view s) -> assignment_source;
[[nodiscard]] auto parse_concordance_class(std::string_view s) -> concordance_class;
[[nodiscard]] auto parse_triage_status(std::string_view s) -> triage_status;
[[nodiscard]] auto parse_adjudication_outcome(std::string_view s) -> adjudication_outcome;
[[nodiscard]] auto parse_rate_basis(std::string_view s) -> rate_basis;
[[nodiscard]] auto parse_review_scope(std::string_view s) -> review_scope;

}  // namespace aquarius
