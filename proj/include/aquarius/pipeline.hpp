/**
 * @file pipeline.hpp
 * @brief Ingestion and the automatic classify / assign / triage stages
 *
 * Every mutation becomes an event: validated, appended to the log (when one
 * is attached), then applied to the in-memory state. Derived stages run as
 * soon as a study's inputs are complete:
 *
 *  - study + AI-positive finding           -> ARM_ASSIGNED
 *  - study + final report (new version)    -> NLP_LABELED
 *  - finding + label, discordant in scope  -> TRIAGE_ENQUEUED
 */

#pragma once

#include "aquarius/classifier.hpp"
#include "aquarius/cohort_state.hpp"
#include "aquarius/event_log.hpp"
#include "aquarius/json_io.hpp"
#include "aquarius/randomizer.hpp"
#include "aquarius/validation.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace aquarius::ingest {

struct pipeline_options {
    trial::trial_config trial;
    nlp::lexicon_config lexicon = nlp::default_lexicon();
};

enum class ingest_status { accepted, duplicate, rejected };

struct ingest_result {
    ingest_status status = ingest_status::accepted;
    std::string message;
};

struct line_error {
    std::size_t line = 0;  ///< 1-based
    std::string message;
};

struct ingest_summary {
    std::size_t accepted = 0;
    std::size_t duplicates = 0;
    std::size_t rejected = 0;
    std::vector<line_error> errors;

    void add(const ingest_summary& other);
};

struct script_summary {
    std::size_t applied = 0;
    std::size_t repeats = 0;
    std::size_t failed = 0;
    std::vector<line_error> errors;
};

/// studies/findings/reports inferred from a file name such as "findings.jsonl".
[[nodiscard]] auto record_kind_from_path(const std::filesystem::path& path)
    -> std::optional<record_kind>;
[[nodiscard]] auto parse_record_kind(std::string_view name) -> record_kind;

class pipeline {
public:
    using clock = std::function<timestamp()>;

    explicit pipeline(pipeline_options options = {}, clock now = &timestamp::now);

    /// Replays an existing log (if any) and appends all further events to it.
    [[nodiscard]] static auto open(pipeline_options options,
                                   const std::filesystem::path& log_path,
                                   clock now = &timestamp::now) -> pipeline;

    pipeline(pipeline&&) noexcept;
    auto operator=(pipeline&&) noexcept -> pipeline&;
    ~pipeline();

    auto ingest(const study_record& study) -> ingest_result;
    auto ingest(const ai_finding& finding) -> ingest_result;
    auto ingest(const report_document& report) -> ingest_result;
    auto ingest_json(record_kind kind, const json& record) -> ingest_result;

    /// One record per line; per-line problems are collected, not thrown.
    auto ingest_lines(std::istream& in, record_kind kind) -> ingest_summary;
    /// Throws error(io_error) when the file cannot be read.
    auto ingest_file(const std::filesystem::path& path, record_kind kind) -> ingest_summary;

    /**
     * @brief Records an expert verdict on a live triage item.
     *
     * Restating the effective verdict is a no-op. Throws error(unknown_item)
     * or error(already_adjudicated) (unless `adj.amendment`).
     */
    auto adjudicate(const adjudication& adj) -> triage_item;

    /// JSON-lines adjudication script; decided_at defaults to the clock.
    auto apply_script(std::istream& in) -> script_summary;
    auto apply_script(const std::filesystem::path& path) -> script_summary;

    [[nodiscard]] auto state() const noexcept -> const cohort_state& { return state_; }
    [[nodiscard]] auto events() const noexcept -> const std::vector<event>& { return events_; }
    [[nodiscard]] auto options() const noexcept -> const pipeline_options& { return options_; }
    [[nodiscard]] auto classifier() const noexcept -> const nlp::report_classifier& {
        return classifier_;
    }

private:
    void emit(event_payload payload);
    void advance(const std::string& study_id);
    void commit();

    /// Defers the fsync of single-record mutations to the end of a batch.
    class batch_scope;

    pipeline_options options_;
    nlp::report_classifier classifier_;
    clock now_;
    cohort_state state_;
    std::vector<event> events_;
    std::unique_ptr<event_log_writer> writer_;
    int batch_depth_ = 0;
};

}  // namespace aquarius::ingest
