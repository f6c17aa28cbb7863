/**
 * @file service.hpp
 * @brief HTTP API over a pipeline
 *
 * Routes (JSON bodies):
 *   POST /v1/studies | /v1/ai-results | /v1/reports     ingest one record
 *   GET  /v1/worklist
 *   GET  /v1/triage/queue?arm=flagged|non-flagged&class=AI_POS_NLP_NEG
 *   GET  /v1/triage/{study_id}
 *   POST /v1/triage/{study_id}/adjudication             {reviewer_id, outcome, note}
 *   GET  /v1/metrics?basis=AI_POSITIVE|CONFIRMED_POSITIVE
 *   GET  /v1/reports/{study_id}                         text + evidence spans
 *   GET  /v1/health
 *
 * Errors are {"error": "<Code>", "message": "..."}. All mutations go through
 * one exclusive lock around the pipeline, so there is a single log writer;
 * reads share the lock and see a consistent, fully committed state.
 */

#pragma once

#include "aquarius/config.hpp"
#include "aquarius/pipeline.hpp"

#include <memory>
#include <string>

namespace aquarius::service {

class qa_service {
public:
    qa_service(service_config config, ingest::pipeline pipeline);
    ~qa_service();

    qa_service(const qa_service&) = delete;
    auto operator=(const qa_service&) -> qa_service& = delete;

    /// Binds host:port (0 picks a free port) and returns the bound port.
    /// Throws error(io_error) when the address cannot be bound.
    auto bind(const std::string& host, int port) -> int;

    /// Serves on the bound socket until stop(); blocks.
    void run();

    /// Runs the accept loop on a background thread.
    void start();
    void stop();

    [[nodiscard]] auto port() const noexcept -> int;

private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

/// Loads config, replays the log, binds and serves until interrupted.
/// Returns a process exit code.
auto serve(const service_config& config) -> int;

}  // namespace aquarius::service
