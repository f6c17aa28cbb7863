/**
 * @file event_log.hpp
 * @brief Append-only JSON-lines event log and deterministic replay
 *
 * Line format: {"seq":N,"kind":"...","recorded_at":"...","payload":{...}}.
 * Sequence numbers are gapless from 1.
 */

#pragma once

#include "aquarius/cohort_state.hpp"
#include "aquarius/types.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace aquarius::ingest {

enum class event_kind {
    study_added,
    ai_finding_added,
    report_added,
    arm_assigned,
    nlp_labeled,
    triage_enqueued,
    adjudicated,
};

[[nodiscard]] auto to_string(event_kind k) -> std::string_view;
[[nodiscard]] auto parse_event_kind(std::string_view s) -> event_kind;

using event_payload = std::variant<study_record, ai_finding, report_document, arm_assignment,
                                   nlp_label, triage_item, adjudication>;

struct event {
    std::uint64_t seq = 0;
    event_kind kind = event_kind::study_added;
    event_payload payload;
    timestamp recorded_at;

    auto operator==(const event&) const -> bool = default;
};

/// The kind implied by a payload's type.
[[nodiscard]] auto kind_of(const event_payload& payload) -> event_kind;

void to_json(nlohmann::json& j, const event& e);
/// Throws error(corrupt_log) on kind/payload mismatch or malformed payload.
void from_json(const nlohmann::json& j, event& e);

/// Applies one event to the materialized state without re-deriving anything.
void apply_event(cohort_state& state, const event& e);

struct log_contents {
    std::vector<event> events;
    /// A final line without its terminating newline that failed to parse.
    bool dropped_partial_tail = false;
};

/**
 * @brief Reads and verifies an event log.
 *
 * A missing file reads as empty. Throws error(corrupt_log) naming the
 * offending seq on gaps, unparsable lines or kind/payload mismatches; an
 * unterminated unparsable last line (an interrupted append) is dropped.
 */
[[nodiscard]] auto read_event_log(const std::filesystem::path& path) -> log_contents;

struct replay_result {
    cohort_state state;
    std::vector<event> events;
    bool dropped_partial_tail = false;
};

[[nodiscard]] auto replay(const std::filesystem::path& log_path) -> replay_result;
[[nodiscard]] auto replay_events(const std::vector<event>& events) -> cohort_state;

/**
 * @brief Single-writer durable appender.
 *
 * append() flushes each line; sync() makes everything appended so far
 * durable. Callers publish state to readers only after sync(). A partial
 * tail left by an earlier crash is truncated on open.
 */
class event_log_writer {
public:
    explicit event_log_writer(const std::filesystem::path& path);
    ~event_log_writer();

    event_log_writer(const event_log_writer&) = delete;
    auto operator=(const event_log_writer&) -> event_log_writer& = delete;

    void append(const event& e);
    void sync();
    [[nodiscard]] auto path() const noexcept -> const std::filesystem::path& { return path_; }

private:
    std::filesystem::path path_;
    std::FILE* file_ = nullptr;
};

}  // namespace aquarius::ingest
