/**
 * @file json_io.hpp
 * @brief JSON mapping for the domain types
 *
 * These overloads define the external wire format used by the JSON-lines
 * ingestion files, the event log and the HTTP API. Parsing is strict about
 * required fields, types and ranges and throws error(invalid_record); unknown
 * fields are ignored.
 */

#pragma once

#include "aquarius/types.hpp"

#include <nlohmann/json.hpp>

namespace aquarius {

using json = nlohmann::json;

void to_json(json& j, const timestamp& v);
void from_json(const json& j, timestamp& v);

void to_json(json& j, const study_record& v);
void from_json(const json& j, study_record& v);

void to_json(json& j, const ai_finding& v);
void from_json(const json& j, ai_finding& v);

void to_json(json& j, const report_document& v);
void from_json(const json& j, report_document& v);

void to_json(json& j, const evidence_span& v);
void from_json(const json& j, evidence_span& v);

void to_json(json& j, const nlp_label& v);
void from_json(const json& j, nlp_label& v);

void to_json(json& j, const arm_assignment& v);
void from_json(const json& j, arm_assignment& v);

void to_json(json& j, const triage_item& v);
void from_json(const json& j, triage_item& v);

void to_json(json& j, const adjudication& v);
void from_json(const json& j, adjudication& v);

void to_json(json& j, const interval& v);
void to_json(json& j, const qa_metrics& v);
void from_json(const json& j, qa_metrics& v);

/// Adjudication body as posted by a reviewer; decided_at defaults to `now`.
[[nodiscard]] auto parse_adjudication_request(const json& j, const std::string& study_id,
                                              timestamp now) -> adjudication;

/// Parses one JSON-lines record, wrapping syntax errors as error(invalid_record).
[[nodiscard]] auto parse_json_line(std::string_view line) -> json;

}  // namespace aquarius
