/**
 * @file metrics_export.hpp
 * @brief Structured and plain-text renderings of QA metrics
 */

#pragma once

#include "aquarius/types.hpp"

#include <string>

namespace aquarius {

/// Pretty-printed JSON object mirroring qa_metrics.
[[nodiscard]] auto metrics_to_json_text(const qa_metrics& m) -> std::string;

/// Aligned table; rates are printed as percentages with 4 decimals.
[[nodiscard]] auto render_metrics_table(const qa_metrics& m) -> std::string;

/// Percentage with fixed decimals, e.g. format_percent(0.0052631, 4) == "0.5263%".
[[nodiscard]] auto format_percent(double fraction, int decimals) -> std::string;

}  // namespace aquarius
