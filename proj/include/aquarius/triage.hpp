/**
 * @file triage.hpp
 * @brief Concordance classes, the discordant-case queue and adjudications
 */

#pragma once

#include "aquarius/randomizer.hpp"
#include "aquarius/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aquarius {
struct cohort_state;
}

namespace aquarius::triage {

[[nodiscard]] auto concordance(bool ai_positive, nlp_label_value nlp) -> concordance_class;

/// The default scope reviews AI_POS_NLP_NEG only; ALL_DISCORDANT adds AI_NEG_NLP_POS.
[[nodiscard]] auto in_review_scope(concordance_class c, review_scope scope) -> bool;

/**
 * @brief Review queue state: at most one item per study plus the append-only
 * adjudication history of each item (latest entry is effective).
 */
class triage_queue {
public:
    /**
     * @brief Creates a PENDING item iff `c` is discordant and within scope.
     *
     * Idempotent: an existing item for the study is returned unchanged.
     */
    auto enqueue_if_discordant(const std::string& study_id, concordance_class c,
                               const trial::trial_config& config, timestamp enqueued_at)
        -> std::optional<triage_item>;

    /// Throws error(unknown_item) or error(already_adjudicated); amendments bypass the latter.
    void check_adjudication(const adjudication& adj) const;

    /// True when `adj` restates the effective verdict and is not an amendment.
    [[nodiscard]] auto is_repeat(const adjudication& adj) const -> bool;

    /// check_adjudication + apply_adjudication.
    auto record_adjudication(const adjudication& adj) -> triage_item;

    /// Unchecked state transition, used for replaying logged events.
    auto apply_adjudication(const adjudication& adj) -> triage_item;
    void apply_enqueue(const triage_item& item);

    [[nodiscard]] auto find(const std::string& study_id) const -> const triage_item*;
    [[nodiscard]] auto effective_adjudication(const std::string& study_id) const
        -> const adjudication*;
    [[nodiscard]] auto history(const std::string& study_id) const
        -> const std::vector<adjudication>&;
    [[nodiscard]] auto items() const noexcept -> const std::map<std::string, triage_item>& {
        return items_;
    }

    auto operator==(const triage_queue&) const -> bool = default;

private:
    std::map<std::string, triage_item> items_;
    std::map<std::string, std::vector<adjudication>> history_;
};

struct queue_filter {
    std::optional<bool> flagged;
    std::optional<concordance_class> concordance;
};

/// PENDING live items ordered by enqueued_at then study_id.
[[nodiscard]] auto pending_queue(const cohort_state& state, const queue_filter& filter = {})
    -> std::vector<triage_item>;

}  // namespace aquarius::triage
