#include "aquarius/pipeline.hpp"

#include "aquarius/error.hpp"
#include "aquarius/triage.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

namespace aquarius::ingest {

void ingest_summary::add(const ingest_summary& other) {
    accepted += other.accepted;
    duplicates += other.duplicates;
    rejected += other.rejected;
    errors.insert(errors.end(), other.errors.begin(), other.errors.end());
}

auto record_kind_from_path(const std::filesystem::path& path) -> std::optional<record_kind> {
    auto stem = path.filename().string();
    std::transform(stem.begin(), stem.end(), stem.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (stem.find("stud") != std::string::npos) {
        return record_kind::study;
    }
    if (stem.find("finding") != std::string::npos || stem.find("ai-result") != std::string::npos ||
        stem.find("ai_result") != std::string::npos) {
        return record_kind::finding;
    }
    if (stem.find("report") != std::string::npos) {
        return record_kind::report;
    }
    return std::nullopt;
}

auto parse_record_kind(std::string_view name) -> record_kind {
    if (name == "studies" || name == "study") {
        return record_kind::study;
    }
    if (name == "findings" || name == "finding" || name == "ai-results") {
        return record_kind::finding;
    }
    if (name == "reports" || name == "report") {
        return record_kind::report;
    }
    throw error(error_code::invalid_record, "unknown record kind '" + std::string(name) + "'");
}

pipeline::pipeline(pipeline_options options, clock now)
    : options_(std::move(options)), classifier_(options_.lexicon), now_(std::move(now)) {
    trial::validate_trial_config(options_.trial);
}

pipeline::pipeline(pipeline&&) noexcept = default;
auto pipeline::operator=(pipeline&&) noexcept -> pipeline& = default;
pipeline::~pipeline() = default;

auto pipeline::open(pipeline_options options, const std::filesystem::path& log_path, clock now)
    -> pipeline {
    pipeline p(std::move(options), std::move(now));
    auto replayed = replay(log_path);
    p.state_ = std::move(replayed.state);
    p.events_ = std::move(replayed.events);
    p.writer_ = std::make_unique<event_log_writer>(log_path);
    return p;
}

void pipeline::emit(event_payload payload) {
    event e;
    e.seq = events_.size() + 1;
    e.kind = kind_of(payload);
    e.payload = std::move(payload);
    e.recorded_at = now_();
    if (writer_) {
        writer_->append(e);
    }
    apply_event(state_, e);
    events_.push_back(std::move(e));
}

void pipeline::commit() {
    if (writer_ && batch_depth_ == 0) {
        writer_->sync();
    }
}

class pipeline::batch_scope {
public:
    explicit batch_scope(pipeline& p) : p_(p) { ++p_.batch_depth_; }
    ~batch_scope() {
        --p_.batch_depth_;
        if (p_.batch_depth_ == 0 && p_.writer_) {
            try {
                p_.writer_->sync();
            } catch (...) {
                // Surfaced by the next append.
            }
        }
    }
    batch_scope(const batch_scope&) = delete;
    auto operator=(const batch_scope&) -> batch_scope& = delete;

private:
    pipeline& p_;
};

void pipeline::advance(const std::string& study_id) {
    if (!state_.studies.contains(study_id)) {
        return;
    }
    const auto finding = state_.findings.find(study_id);
    const bool have_finding = finding != state_.findings.end();

    if (have_finding && finding->second.ai_positive && !state_.assignments.contains(study_id)) {
        emit(trial::assign_arm(finding->second, options_.trial));
    }

    if (const auto* report = state_.current_report(study_id)) {
        auto label = state_.labels.find(study_id);
        if (label == state_.labels.end() ||
            label->second.report_finalized_at != report->finalized_at) {
            emit(classifier_.classify_report(*report));
        }
    }

    const auto label = state_.labels.find(study_id);
    if (have_finding && label != state_.labels.end() && !state_.triage.find(study_id)) {
        const auto cls = triage::concordance(finding->second.ai_positive, label->second.label);
        if (triage::in_review_scope(cls, options_.trial.scope)) {
            const auto enqueued_at =
                std::max(finding->second.received_at, label->second.report_finalized_at);
            emit(triage_item(study_id, cls, enqueued_at));
        }
    }
}

auto pipeline::ingest(const study_record& study) -> ingest_result {
    if (study.study_id.empty()) {
        return {ingest_status::rejected, "empty study_id"};
    }
    if (!options_.trial.exam_type.empty() && study.exam_type != options_.trial.exam_type) {
        return {ingest_status::rejected, "exam_type '" + study.exam_type + "' is not '" +
                                             options_.trial.exam_type + "'"};
    }
    if (auto it = state_.studies.find(study.study_id); it != state_.studies.end()) {
        if (it->second == study) {
            return {ingest_status::duplicate, ""};
        }
        return {ingest_status::rejected,
                "conflicting duplicate study_id '" + study.study_id + "'"};
    }
    emit(study);
    advance(study.study_id);
    commit();
    return {};
}

auto pipeline::ingest(const ai_finding& finding) -> ingest_result {
    if (finding.study_id.empty()) {
        return {ingest_status::rejected, "empty study_id"};
    }
    if (finding.ai_score && !(*finding.ai_score >= 0.0 && *finding.ai_score <= 1.0)) {
        return {ingest_status::rejected, "ai_score out of range [0,1]"};
    }
    if (!options_.trial.finding_code.empty() &&
        finding.finding_code != options_.trial.finding_code) {
        return {ingest_status::rejected, "finding_code '" + finding.finding_code + "' is not '" +
                                             options_.trial.finding_code + "'"};
    }
    if (auto it = state_.findings.find(finding.study_id); it != state_.findings.end()) {
        if (it->second == finding) {
            return {ingest_status::duplicate, ""};
        }
        return {ingest_status::rejected,
                "conflicting duplicate finding for '" + finding.study_id + "'"};
    }
    emit(finding);
    advance(finding.study_id);
    commit();
    return {};
}

auto pipeline::ingest(const report_document& report) -> ingest_result {
    if (report.study_id.empty()) {
        return {ingest_status::rejected, "empty study_id"};
    }
    if (report.text.empty()) {
        return {ingest_status::rejected, "empty report text"};
    }
    if (auto it = state_.reports.find(report.study_id); it != state_.reports.end()) {
        for (const auto& version : it->second) {
            if (version == report) {
                return {ingest_status::duplicate, ""};
            }
            if (version.finalized_at == report.finalized_at) {
                return {ingest_status::rejected,
                        "a different report for '" + report.study_id +
                            "' was finalized at the same instant"};
            }
        }
    }
    emit(report);
    advance(report.study_id);
    commit();
    return {};
}

auto pipeline::ingest_json(record_kind kind, const json& record) -> ingest_result {
    try {
        switch (kind) {
            case record_kind::study: return ingest(record.get<study_record>());
            case record_kind::finding: return ingest(record.get<ai_finding>());
            case record_kind::report: return ingest(record.get<report_document>());
        }
    } catch (const error& e) {
        if (e.code() == error_code::io_error) {
            throw;
        }
        return {ingest_status::rejected, e.what()};
    } catch (const json::exception& e) {
        return {ingest_status::rejected, e.what()};
    }
    return {ingest_status::rejected, "unknown record kind"};
}

auto pipeline::ingest_lines(std::istream& in, record_kind kind) -> ingest_summary {
    ingest_summary summary;
    const batch_scope batch(*this);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        ingest_result r;
        try {
            r = ingest_json(kind, parse_json_line(line));
        } catch (const error& e) {
            if (e.code() == error_code::io_error) {
                throw;
            }
            r = {ingest_status::rejected, e.what()};
        }
        switch (r.status) {
            case ingest_status::accepted: ++summary.accepted; break;
            case ingest_status::duplicate: ++summary.duplicates; break;
            case ingest_status::rejected:
                ++summary.rejected;
                summary.errors.push_back({number, r.message});
                break;
        }
    }
    return summary;
}

auto pipeline::ingest_file(const std::filesystem::path& path, record_kind kind)
    -> ingest_summary {
    std::ifstream in(path);
    if (!in) {
        throw error(error_code::io_error, "cannot read " + path.string());
    }
    return ingest_lines(in, kind);
}

auto pipeline::adjudicate(const adjudication& adj) -> triage_item {
    const auto* item = state_.triage.find(adj.study_id);
    if (!item) {
        throw error(error_code::unknown_item, "no triage item for study '" + adj.study_id + "'");
    }
    if (!state_.is_live(*item)) {
        throw error(error_code::unknown_item,
                    "study '" + adj.study_id + "' is no longer discordant");
    }
    if (state_.triage.is_repeat(adj)) {
        return *item;
    }
    state_.triage.check_adjudication(adj);
    emit(adj);
    commit();
    return *state_.triage.find(adj.study_id);
}

auto pipeline::apply_script(std::istream& in) -> script_summary {
    script_summary summary;
    const batch_scope batch(*this);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto j = parse_json_line(line);
            if (!j.is_object() || !j.contains("study_id") || !j["study_id"].is_string()) {
                throw error(error_code::invalid_record, "missing field 'study_id'");
            }
            const auto adj =
                parse_adjudication_request(j, j["study_id"].get<std::string>(), now_());
            const bool repeat = state_.triage.is_repeat(adj);
            adjudicate(adj);
            ++(repeat ? summary.repeats : summary.applied);
        } catch (const error& e) {
            if (e.code() == error_code::io_error) {
                throw;
            }
            ++summary.failed;
            summary.errors.push_back({number, e.what()});
        }
    }
    return summary;
}

auto pipeline::apply_script(const std::filesystem::path& path) -> script_summary {
    std::ifstream in(path);
    if (!in) {
        throw error(error_code::io_error, "cannot read " + path.string());
    }
    return apply_script(in);
}

}  // namespace aquarius::ingest
