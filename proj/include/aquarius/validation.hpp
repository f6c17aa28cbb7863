/**
 * @file validation.hpp
 * @brief Read-only consistency checks over parsed ingestion collections
 */

#pragma once

#include "aquarius/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace aquarius {

enum class issue_severity { error, warning };
enum class record_kind { study, finding, report };

[[nodiscard]] auto to_string(record_kind k) -> std::string_view;

struct validation_issue {
    issue_severity severity = issue_severity::error;
    record_kind kind = record_kind::study;
    std::size_t index = 0;  ///< position within its collection
    std::string study_id;
    std::string message;
};

struct validation_report {
    std::vector<validation_issue> issues;

    [[nodiscard]] auto error_count() const -> std::size_t;
    [[nodiscard]] auto warning_count() const -> std::size_t;
    [[nodiscard]] auto ok() const -> bool { return error_count() == 0; }
};

/**
 * @brief Cross-checks studies, findings and reports without mutating anything.
 *
 * Errors: conflicting duplicate studies or findings, dangling study
 * references, out-of-range scores, empty report text. Warnings: identical
 * duplicates and studies missing a finding or a report.
 */
[[nodiscard]] auto validate_cohort(std::span<const study_record> studies,
                                   std::span<const ai_finding> findings,
                                   std::span<const report_document> reports)
    -> validation_report;

}  // namespace aquarius
