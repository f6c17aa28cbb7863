#include "aquarius/validation.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace aquarius {

auto to_string(record_kind k) -> std::string_view {
    switch (k) {
        case record_kind::study: return "study";
        case record_kind::finding: return "finding";
        case record_kind::report: return "report";
    }
    return "?";
}

auto validation_report::error_count() const -> std::size_t {
    return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(), [](const auto& i) {
        return i.severity == issue_severity::error;
    }));
}

auto validation_report::warning_count() const -> std::size_t {
    return issues.size() - error_count();
}

auto validate_cohort(std::span<const study_record> studies, std::span<const ai_finding> findings,
                     std::span<const report_document> reports) -> validation_report {
    validation_report out;
    auto add = [&](issue_severity sev, record_kind kind, std::size_t index,
                   const std::string& id, std::string message) {
        out.issues.push_back({sev, kind, index, id, std::move(message)});
    };

    std::map<std::string, const study_record*> known;
    for (std::size_t i = 0; i < studies.size(); ++i) {
        const auto& s = studies[i];
        if (s.study_id.empty()) {
            add(issue_severity::error, record_kind::study, i, s.study_id, "empty study_id");
            continue;
        }
        auto [it, inserted] = known.emplace(s.study_id, &s);
        if (!inserted) {
            if (*it->second == s) {
                add(issue_severity::warning, record_kind::study, i, s.study_id,
                    "identical duplicate of study '" + s.study_id + "'");
            } else {
                add(issue_severity::error, record_kind::study, i, s.study_id,
                    "conflicting duplicate study_id '" + s.study_id + "'");
            }
        }
    }

    std::map<std::string, const ai_finding*> finding_of;
    for (std::size_t i = 0; i < findings.size(); ++i) {
        const auto& f = findings[i];
        if (!known.contains(f.study_id)) {
            add(issue_severity::error, record_kind::finding, i, f.study_id,
                "finding references unknown study_id '" + f.study_id + "'");
        }
        if (f.ai_score && !(*f.ai_score >= 0.0 && *f.ai_score <= 1.0)) {
            add(issue_severity::error, record_kind::finding, i, f.study_id,
                "ai_score out of range [0,1]");
        }
        auto [it, inserted] = finding_of.emplace(f.study_id, &f);
        if (!inserted) {
            if (*it->second == f) {
                add(issue_severity::warning, record_kind::finding, i, f.study_id,
                    "identical duplicate finding for '" + f.study_id + "'");
            } else {
                add(issue_severity::error, record_kind::finding, i, f.study_id,
                    "conflicting duplicate finding for '" + f.study_id + "'");
            }
        }
    }

    std::map<std::string, std::vector<const report_document*>> reports_of;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        if (!known.contains(r.study_id)) {
            add(issue_severity::error, record_kind::report, i, r.study_id,
                "report references unknown study_id '" + r.study_id + "'");
        }
        if (r.text.empty()) {
            add(issue_severity::error, record_kind::report, i, r.study_id, "empty report text");
        }
        auto& versions = reports_of[r.study_id];
        for (const auto* prev : versions) {
            if (prev->finalized_at == r.finalized_at && prev->text != r.text) {
                add(issue_severity::error, record_kind::report, i, r.study_id,
                    "two different reports finalized at the same instant for '" + r.study_id +
                        "'");
            }
        }
        versions.push_back(&r);
    }

    std::size_t index = 0;
    std::set<std::string> reported;
    for (const auto& s : studies) {
        if (reported.insert(s.study_id).second) {
            if (!finding_of.contains(s.study_id)) {
                add(issue_severity::warning, record_kind::study, index, s.study_id,
                    "study '" + s.study_id + "' has no AI finding");
            }
            if (!reports_of.contains(s.study_id)) {
                add(issue_severity::warning, record_kind::study, index, s.study_id,
                    "study '" + s.study_id + "' has no report");
            }
        }
        ++index;
    }
    return out;
}

}  // namespace aquarius
