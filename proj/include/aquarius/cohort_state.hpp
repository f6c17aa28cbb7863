/**
 * @file cohort_state.hpp
 * @brief The materialized state of one cohort, rebuilt from its event log
 */

#pragma once

#include "aquarius/triage.hpp"
#include "aquarius/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aquarius {

/**
 * @brief Everything known about a cohort.
 *
 * Report versions are kept in finalized_at order; the last one is the final
 * report. A triage item is live while the study's current concordance still
 * equals the class it was enqueued with; an item made stale by a superseding
 * report stays in the history but leaves the queue and the metrics.
 */
struct cohort_state {
    std::map<std::string, study_record> studies;
    std::map<std::string, ai_finding> findings;
    std::map<std::string, std::vector<report_document>> reports;
    std::map<std::string, nlp_label> labels;
    std::map<std::string, arm_assignment> assignments;
    triage::triage_queue triage;

    [[nodiscard]] auto current_report(const std::string& study_id) const
        -> const report_document*;

    /// Defined once a finding and a label exist for the study.
    [[nodiscard]] auto concordance_of(const std::string& study_id) const
        -> std::optional<concordance_class>;

    [[nodiscard]] auto is_live(const triage_item& item) const -> bool;
    [[nodiscard]] auto live_items() const -> std::vector<triage_item>;

    void add_report_version(const report_document& report);

    auto operator==(const cohort_state&) const -> bool = default;
};

}  // namespace aquarius
