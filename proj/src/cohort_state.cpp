#include "aquarius/cohort_state.hpp"

#include <algorithm>

namespace aquarius {

auto cohort_state::current_report(const std::string& study_id) const -> const report_document* {
    auto it = reports.find(study_id);
    if (it == reports.end() || it->second.empty()) {
        return nullptr;
    }
    return &it->second.back();
}

auto cohort_state::concordance_of(const std::string& study_id) const
    -> std::optional<concordance_class> {
    auto f = findings.find(study_id);
    auto l = labels.find(study_id);
    if (f == findings.end() || l == labels.end()) {
        return std::nullopt;
    }
    return triage::concordance(f->second.ai_positive, l->second.label);
}

auto cohort_state::is_live(const triage_item& item) const -> bool {
    return concordance_of(item.study_id()) == item.concordance();
}

auto cohort_state::live_items() const -> std::vector<triage_item> {
    std::vector<triage_item> out;
    for (const auto& [id, item] : triage.items()) {
        if (is_live(item)) {
            out.push_back(item);
        }
    }
    return out;
}

void cohort_state::add_report_version(const report_document& report) {
    auto& versions = reports[report.study_id];
    auto pos = std::upper_bound(versions.begin(), versions.end(), report.finalized_at,
                                [](const timestamp& t, const report_document& r) {
                                    return t < r.finalized_at;
                                });
    versions.insert(pos, report);
}

}  // namespace aquarius
