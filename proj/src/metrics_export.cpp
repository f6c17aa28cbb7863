#include "aquarius/metrics_export.hpp"

#include "aquarius/json_io.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>

namespace aquarius {

auto metrics_to_json_text(const qa_metrics& m) -> std::string {
    return json(m).dump(2);
}

auto format_percent(double fraction, int decimals) -> std::string {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f%%", decimals, fraction * 100.0);
    return buf;
}

auto render_metrics_table(const qa_metrics& m) -> std::string {
    std::ostringstream out;
    auto row = [&](const std::string& label, const std::string& value) {
        out << std::left << std::setw(32) << label << value << '\n';
    };
    auto arm_row = [&](const std::string& label, const std::string& flagged,
                       const std::string& nonflagged) {
        out << std::left << std::setw(32) << label << std::setw(22) << flagged << nonflagged
            << '\n';
    };
    auto ci = [](const interval& i) {
        return "[" + format_percent(i.lo, 4) + ", " + format_percent(i.hi, 4) + "]";
    };
    char pbuf[32];
    std::snprintf(pbuf, sizeof pbuf, "%.6f", m.p_value);

    row("cohort size", std::to_string(m.cohort_size));
    row("AI-positive studies", std::to_string(m.ai_positive_total));
    row("review queue size", std::to_string(m.queue_size));
    row("effort reduction", format_percent(m.effort_reduction, 4));
    row("rate basis", std::string(to_string(m.basis)));
    out << '\n';
    arm_row("", "flagged", "non-flagged");
    arm_row("AI-positive in arm", std::to_string(m.flagged_count),
            std::to_string(m.nonflagged_count));
    arm_row("missed (TRUE_POSITIVE_MISSED)", std::to_string(m.missed_flagged),
            std::to_string(m.missed_nonflagged));
    arm_row("rate denominator", std::to_string(m.denominator_flagged),
            std::to_string(m.denominator_nonflagged));
    arm_row("missed detection rate", format_percent(m.missed_rate_flagged, 4),
            format_percent(m.missed_rate_nonflagged, 4));
    char zbuf[32];
    std::snprintf(zbuf, sizeof zbuf, "Wilson interval (z=%.2f)", m.z);
    arm_row(zbuf, ci(m.ci_flagged), ci(m.ci_nonflagged));
    out << '\n';
    row("Fisher exact p (two-sided)", pbuf);
    return out.str();
}

}  // namespace aquarius
