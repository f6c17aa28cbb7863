#include "aquarius/types.hpp"

#include "aquarius/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace aquarius {

auto to_string(error_code code) -> std::string_view {
    switch (code) {
        case error_code::invalid_record: return "InvalidRecord";
        case error_code::invalid_timestamp: return "InvalidTimestamp";
        case error_code::conflicting_duplicate: return "ConflictingDuplicate";
        case error_code::empty_lexicon: return "EmptyLexicon";
        case error_code::invalid_lexicon: return "InvalidLexicon";
        case error_code::invalid_config: return "InvalidConfig";
        case error_code::not_ai_positive: return "NotAIPositive";
        case error_code::not_discordant: return "NotDiscordant";
        case error_code::unknown_item: return "UnknownItem";
        case error_code::already_adjudicated: return "AlreadyAdjudicated";
        case error_code::incomplete_adjudication: return "IncompleteAdjudication";
        case error_code::zero_denominator: return "ZeroDenominator";
        case error_code::zero_cohort: return "ZeroCohort";
        case error_code::invalid_counts: return "InvalidCounts";
        case error_code::corrupt_log: return "CorruptLog";
        case error_code::io_error: return "IOError";
    }
    return "Unknown";
}

triage_item::triage_item(std::string study_id, concordance_class concordance,
                         timestamp enqueued_at, triage_status status)
    : study_id_(std::move(study_id)),
      concordance_(concordance),
      status_(status),
      enqueued_at_(enqueued_at) {
    if (!is_discordant(concordance)) {
        throw error(error_code::not_discordant,
                    "triage item for '" + study_id_ + "' requires a discordant class, got " +
                        std::string(to_string(concordance)));
    }
}

namespace {

template <typename Enum, std::size_t N>
using name_table = std::array<std::pair<Enum, std::string_view>, N>;

constexpr name_table<polarity, 3> polarity_names{{
    {polarity::affirmed, "AFFIRMED"},
    {polarity::negated, "NEGATED"},
    {polarity::uncertain, "UNCERTAIN"},
}};

constexpr name_table<nlp_label_value, 2> label_names{{
    {nlp_label_value::positive, "POSITIVE"},
    {nlp_label_value::negative, "NEGATIVE"},
}};

constexpr name_table<assignment_source, 2> source_names{{
    {assignment_source::hash, "HASH"},
    {assignment_source::override, "OVERRIDE"},
}};

constexpr name_table<concordance_class, 4> concordance_names{{
    {concordance_class::ai_pos_nlp_pos, "AI_POS_NLP_POS"},
    {concordance_class::ai_pos_nlp_neg, "AI_POS_NLP_NEG"},
    {concordance_class::ai_neg_nlp_pos, "AI_NEG_NLP_POS"},
    {concordance_class::ai_neg_nlp_neg, "AI_NEG_NLP_NEG"},
}};

constexpr name_table<triage_status, 2> status_names{{
    {triage_status::pending, "PENDING"},
    {triage_status::adjudicated, "ADJUDICATED"},
}};

constexpr name_table<adjudication_outcome, 4> outcome_names{{
    {adjudication_outcome::true_positive_missed, "TRUE_POSITIVE_MISSED"},
    {adjudication_outcome::reported_nlp_error, "REPORTED_NLP_ERROR"},
    {adjudication_outcome::ai_false_positive, "AI_FALSE_POSITIVE"},
    {adjudication_outcome::other, "OTHER"},
}};

constexpr name_table<rate_basis, 2> basis_names{{
    {rate_basis::ai_positive, "AI_POSITIVE"},
    {rate_basis::confirmed_positive, "CONFIRMED_POSITIVE"},
}};

constexpr name_table<review_scope, 2> scope_names{{
    {review_scope::ai_pos_nlp_neg_only, "AI_POS_NLP_NEG_ONLY"},
    {review_scope::all_discordant, "ALL_DISCORDANT"},
}};

template <typename Enum, std::size_t N>
auto name_of(const name_table<Enum, N>& table, Enum value) -> std::string_view {
    for (const auto& [e, name] : table) {
        if (e == value) {
            return name;
        }
    }
    return "?";
}

auto upper(std::string_view s) -> std::string {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

// Names are matched case-insensitively; '-' is accepted for '_'.
template <typename Enum, std::size_t N>
auto value_of(const name_table<Enum, N>& table, std::string_view s, std::string_view what)
    -> Enum {
    auto key = upper(s);
    std::replace(key.begin(), key.end(), '-', '_');
    for (const auto& [e, name] : table) {
        if (key == name) {
            return e;
        }
    }
    throw error(error_code::invalid_record,
                "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

}  // namespace

auto to_string(polarity p) -> std::string_view { return name_of(polarity_names, p); }
auto to_string(nlp_label_value v) -> std::string_view { return name_of(label_names, v); }
auto to_string(assignment_source s) -> std::string_view { return name_of(source_names, s); }
auto to_string(concordance_class c) -> std::string_view { return name_of(concordance_names, c); }
auto to_string(triage_status s) -> std::string_view { return name_of(status_names, s); }
auto to_string(adjudication_outcome o) -> std::string_view { return name_of(outcome_names, o); }
auto to_string(rate_basis b) -> std::string_view { return name_of(basis_names, b); }
auto to_string(review_scope s) -> std::string_view { return name_of(scope_names, s); }

auto parse_polarity(std::string_view s) -> polarity {
    return value_of(polarity_names, s, "polarity");
}
auto parse_nlp_label_value(std::string_view s) -> nlp_label_value {
    return value_of(label_names, s, "label");
}
auto parse_assignment_source(std::string_view s) -> assignment_source {
    return value_of(source_names, s, "assignment source");
}
auto parse_concordance_class(std::string_view s) -> concordance_class {
    return value_of(concordance_names, s, "concordance class");
}
auto parse_triage_status(std::string_view s) -> triage_status {
    return value_of(status_names, s, "triage status");
}
auto parse_adjudication_outcome(std::string_view s) -> adjudication_outcome {
    return value_of(outcome_names, s, "adjudication outcome");
}
auto parse_rate_basis(std::string_view s) -> rate_basis {
    return value_of(basis_names, s, "rate basis");
}
auto parse_review_scope(std::string_view s) -> review_scope {
    return value_of(scope_names, s, "review scope");
}

}  // namespace aquarius
