#include "aquarius/event_log.hpp"

#include "aquarius/error.hpp"
#include "aquarius/json_io.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

namespace aquarius::ingest {

namespace {

constexpr std::array<std::pair<event_kind, std::string_view>, 7> kind_names{{
    {event_kind::study_added, "STUDY_ADDED"},
    {event_kind::ai_finding_added, "AI_FINDING_ADDED"},
    {event_kind::report_added, "REPORT_ADDED"},
    {event_kind::arm_assigned, "ARM_ASSIGNED"},
    {event_kind::nlp_labeled, "NLP_LABELED"},
    {event_kind::triage_enqueued, "TRIAGE_ENQUEUED"},
    {event_kind::adjudicated, "ADJUDICATED"},
}};

[[noreturn]] void corrupt(std::uint64_t seq, const std::string& why) {
    throw error(error_code::corrupt_log, "corrupt event log at seq " + std::to_string(seq) + ": " +
                                             why);
}

template <typename T>
auto payload_as(const nlohmann::json& j) -> event_payload {
    return event_payload{j.get<T>()};
}

}  // namespace

auto to_string(event_kind k) -> std::string_view {
    for (const auto& [kind, name] : kind_names) {
        if (kind == k) {
            return name;
        }
    }
    return "?";
}

auto parse_event_kind(std::string_view s) -> event_kind {
    for (const auto& [kind, name] : kind_names) {
        if (name == s) {
            return kind;
        }
    }
    throw error(error_code::corrupt_log, "unknown event kind '" + std::string(s) + "'");
}

auto kind_of(const event_payload& payload) -> event_kind {
    return std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, study_record>) {
                return event_kind::study_added;
            } else if constexpr (std::is_same_v<T, ai_finding>) {
                return event_kind::ai_finding_added;
            } else if constexpr (std::is_same_v<T, report_document>) {
                return event_kind::report_added;
            } else if constexpr (std::is_same_v<T, arm_assignment>) {
                return event_kind::arm_assigned;
            } else if constexpr (std::is_same_v<T, nlp_label>) {
                return event_kind::nlp_labeled;
            } else if constexpr (std::is_same_v<T, triage_item>) {
                return event_kind::triage_enqueued;
            } else {
                return event_kind::adjudicated;
            }
        },
        payload);
}

void to_json(nlohmann::json& j, const event& e) {
    nlohmann::json payload;
    std::visit([&](const auto& v) { payload = v; }, e.payload);
    j = nlohmann::json{{"seq", e.seq},
                       {"kind", to_string(e.kind)},
                       {"recorded_at", e.recorded_at},
                       {"payload", std::move(payload)}};
}

void from_json(const nlohmann::json& j, event& e) {
    std::uint64_t seq = 0;
    if (j.is_object() && j.contains("seq") && j["seq"].is_number_unsigned()) {
        seq = j["seq"].get<std::uint64_t>();
    } else {
        corrupt(0, "missing or invalid seq");
    }
    try {
        e.seq = seq;
        e.kind = parse_event_kind(j.at("kind").get<std::string>());
        e.recorded_at = j.at("recorded_at").get<timestamp>();
        const auto& p = j.at("payload");
        switch (e.kind) {
            case event_kind::study_added: e.payload = payload_as<study_record>(p); break;
            case event_kind::ai_finding_added: e.payload = payload_as<ai_finding>(p); break;
            case event_kind::report_added: e.payload = payload_as<report_document>(p); break;
            case event_kind::arm_assigned: e.payload = payload_as<arm_assignment>(p); break;
            case event_kind::nlp_labeled: e.payload = payload_as<nlp_label>(p); break;
            case event_kind::triage_enqueued: e.payload = payload_as<triage_item>(p); break;
            case event_kind::adjudicated: e.payload = payload_as<adjudication>(p); break;
        }
    } catch (const nlohmann::json::exception& ex) {
        corrupt(seq, ex.what());
    } catch (const error& ex) {
        corrupt(seq, std::string("payload does not match kind: ") + ex.what());
    }
}

void apply_event(cohort_state& state, const event& e) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, study_record>) {
                state.studies.insert_or_assign(v.study_id, v);
            } else if constexpr (std::is_same_v<T, ai_finding>) {
                state.findings.insert_or_assign(v.study_id, v);
            } else if constexpr (std::is_same_v<T, report_document>) {
                state.add_report_version(v);
            } else if constexpr (std::is_same_v<T, arm_assignment>) {
                state.assignments.insert_or_assign(v.study_id, v);
            } else if constexpr (std::is_same_v<T, nlp_label>) {
                state.labels.insert_or_assign(v.study_id, v);
            } else if constexpr (std::is_same_v<T, triage_item>) {
                state.triage.apply_enqueue(v);
            } else {
                if (!state.triage.find(v.study_id)) {
                    corrupt(e.seq, "adjudication for study '" + v.study_id +
                                       "' without a triage item");
                }
                state.triage.apply_adjudication(v);
            }
        },
        e.payload);
}

auto read_event_log(const std::filesystem::path& path) -> log_contents {
    log_contents out;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!std::filesystem::exists(path)) {
            return out;
        }
        throw error(error_code::io_error, "cannot open event log " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string data = buffer.str();

    std::size_t pos = 0;
    std::uint64_t expected = 1;
    while (pos < data.size()) {
        const auto nl = data.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        const auto line = std::string_view(data).substr(pos, (terminated ? nl : data.size()) - pos);
        pos = terminated ? nl + 1 : data.size();
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& ex) {
            if (!terminated) {
                out.dropped_partial_tail = true;
                break;
            }
            corrupt(expected, std::string("unparsable line: ") + ex.what());
        }
        auto e = j.get<event>();
        if (e.seq != expected) {
            throw error(error_code::corrupt_log,
                        "corrupt event log: seq gap, expected seq " + std::to_string(expected) +
                            " but found seq " + std::to_string(e.seq));
        }
        if (kind_of(e.payload) != e.kind) {
            corrupt(e.seq, "payload does not match kind");
        }
        out.events.push_back(std::move(e));
        ++expected;
    }
    return out;
}

auto replay_events(const std::vector<event>& events) -> cohort_state {
    cohort_state state;
    for (const auto& e : events) {
        apply_event(state, e);
    }
    return state;
}

auto replay(const std::filesystem::path& log_path) -> replay_result {
    auto contents = read_event_log(log_path);
    replay_result out;
    out.state = replay_events(contents.events);
    out.events = std::move(contents.events);
    out.dropped_partial_tail = contents.dropped_partial_tail;
    return out;
}

event_log_writer::event_log_writer(const std::filesystem::path& path) : path_(path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    // Drop an unterminated tail so the next append starts on a fresh line.
    if (std::filesystem::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream buffer;
        buffer << in.rdbuf();
        const auto data = buffer.str();
        if (!data.empty() && data.back() != '\n') {
            const auto last_nl = data.rfind('\n');
            const auto keep = last_nl == std::string::npos ? 0 : last_nl + 1;
            std::filesystem::resize_file(path, keep);
        }
    }
    file_ = std::fopen(path.c_str(), "ab");
    if (!file_) {
        throw error(error_code::io_error, "cannot open event log for append: " + path.string());
    }
}

event_log_writer::~event_log_writer() {
    if (file_) {
        std::fclose(file_);
    }
}

void event_log_writer::append(const event& e) {
    const auto line = nlohmann::json(e).dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
        std::fflush(file_) != 0) {
        throw error(error_code::io_error, "failed to append to event log " + path_.string());
    }
}

void event_log_writer::sync() {
    if (std::fflush(file_) != 0 || ::fsync(::fileno(file_)) != 0) {
        throw error(error_code::io_error, "failed to sync event log " + path_.string());
    }
}

}  // namespace aquarius::ingest
