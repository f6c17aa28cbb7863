#include "aquarius/json_io.hpp"

#include "aquarius/error.hpp"

namespace aquarius {

namespace {

[[noreturn]] void fail(const std::string& message) {
    throw error(error_code::invalid_record, message);
}

auto require(const json& j, const char* key) -> const json& {
    if (!j.is_object()) {
        fail("expected a JSON object");
    }
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        fail(std::string("missing field '") + key + "'");
    }
    return *it;
}

auto optional_field(const json& j, const char* key) -> const json* {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return nullptr;
    }
    return &*it;
}

auto get_string(const json& j, const char* key) -> std::string {
    const auto& v = require(j, key);
    if (!v.is_string()) {
        fail(std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

auto get_id(const json& j, const char* key) -> std::string {
    auto s = get_string(j, key);
    if (s.empty()) {
        fail(std::string("field '") + key + "' must be non-empty");
    }
    return s;
}

auto get_bool(const json& j, const char* key) -> bool {
    const auto& v = require(j, key);
    if (!v.is_boolean()) {
        fail(std::string("field '") + key + "' must be a boolean");
    }
    return v.get<bool>();
}

auto get_count(const json& j, const char* key) -> std::size_t {
    const auto& v = require(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        fail(std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

auto get_number(const json& j, const char* key) -> double {
    const auto& v = require(j, key);
    if (!v.is_number()) {
        fail(std::string("field '") + key + "' must be a number");
    }
    return v.get<double>();
}

auto get_time(const json& j, const char* key) -> timestamp {
    auto s = get_string(j, key);
    auto ts = timestamp::try_parse(s);
    if (!ts) {
        fail(std::string("field '") + key + "' is not an RFC 3339 timestamp: '" + s + "'");
    }
    return *ts;
}

}  // namespace

void to_json(json& j, const timestamp& v) { j = v.to_string(); }

void from_json(const json& j, timestamp& v) {
    if (!j.is_string()) {
        fail("timestamp must be a string");
    }
    auto ts = timestamp::try_parse(j.get<std::string>());
    if (!ts) {
        fail("not an RFC 3339 timestamp: '" + j.get<std::string>() + "'");
    }
    v = *ts;
}

void to_json(json& j, const study_record& v) {
    j = json{{"study_id", v.study_id},
             {"acquired_at", v.acquired_at},
             {"scanner_id", v.scanner_id},
             {"exam_type", v.exam_type}};
}

void from_json(const json& j, study_record& v) {
    v.study_id = get_id(j, "study_id");
    v.acquired_at = get_time(j, "acquired_at");
    v.scanner_id = get_string(j, "scanner_id");
    v.exam_type = get_string(j, "exam_type");
}

void to_json(json& j, const ai_finding& v) {
    j = json{{"study_id", v.study_id},
             {"finding_code", v.finding_code},
             {"ai_positive", v.ai_positive},
             {"model_version", v.model_version},
             {"received_at", v.received_at}};
    if (v.ai_score) {
        j["ai_score"] = *v.ai_score;
    }
    if (v.flagged_override) {
        j["flagged_override"] = *v.flagged_override;
    }
}

void from_json(const json& j, ai_finding& v) {
    v.study_id = get_id(j, "study_id");
    v.finding_code = get_id(j, "finding_code");
    v.ai_positive = get_bool(j, "ai_positive");
    v.ai_score.reset();
    if (const auto* score = optional_field(j, "ai_score")) {
        if (!score->is_number()) {
            fail("field 'ai_score' must be a number");
        }
        const double s = score->get<double>();
        if (!(s >= 0.0 && s <= 1.0)) {
            fail("ai_score " + score->dump() + " out of range [0,1]");
        }
        v.ai_score = s;
    }
    v.model_version = get_string(j, "model_version");
    v.received_at = get_time(j, "received_at");
    v.flagged_override.reset();
    if (const auto* f = optional_field(j, "flagged_override")) {
        if (!f->is_boolean()) {
            fail("field 'flagged_override' must be a boolean");
        }
        v.flagged_override = f->get<bool>();
    }
}

void to_json(json& j, const report_document& v) {
    j = json{{"study_id", v.study_id}, {"text", v.text}, {"finalized_at", v.finalized_at}};
}

void from_json(const json& j, report_document& v) {
    v.study_id = get_id(j, "study_id");
    v.text = get_string(j, "text");
    if (v.text.empty()) {
        fail("report text must be non-empty");
    }
    v.finalized_at = get_time(j, "finalized_at");
}

void to_json(json& j, const evidence_span& v) {
    j = json{{"sentence_index", v.sentence_index},
             {"start", v.range.start},
             {"end", v.range.end},
             {"matched_term", v.matched_term},
             {"polarity", to_string(v.polarity)}};
}

void from_json(const json& j, evidence_span& v) {
    v.sentence_index = get_count(j, "sentence_index");
    v.range.start = get_count(j, "start");
    v.range.end = get_count(j, "end");
    if (v.range.start >= v.range.end) {
        fail("evidence span must satisfy start < end");
    }
    v.matched_term = get_string(j, "matched_term");
    v.polarity = parse_polarity(get_string(j, "polarity"));
}

void to_json(json& j, const nlp_label& v) {
    j = json{{"study_id", v.study_id},
             {"label", to_string(v.label)},
             {"evidence", v.evidence},
             {"classifier_version", v.classifier_version},
             {"report_finalized_at", v.report_finalized_at}};
}

void from_json(const json& j, nlp_label& v) {
    v.study_id = get_id(j, "study_id");
    v.label = parse_nlp_label_value(get_string(j, "label"));
    const auto& ev = require(j, "evidence");
    if (!ev.is_array()) {
        fail("field 'evidence' must be an array");
    }
    v.evidence = ev.get<std::vector<evidence_span>>();
    v.classifier_version = get_string(j, "classifier_version");
    v.report_finalized_at = get_time(j, "report_finalized_at");
}

void to_json(json& j, const arm_assignment& v) {
    j = json{{"study_id", v.study_id},
             {"flagged", v.flagged},
             {"trial_seed", v.trial_seed},
             {"assigned_at", v.assigned_at},
             {"source", to_string(v.source)}};
}

void from_json(const json& j, arm_assignment& v) {
    v.study_id = get_id(j, "study_id");
    v.flagged = get_bool(j, "flagged");
    v.trial_seed = get_string(j, "trial_seed");
    v.assigned_at = get_time(j, "assigned_at");
    v.source = parse_assignment_source(get_string(j, "source"));
}

void to_json(json& j, const triage_item& v) {
    j = json{{"study_id", v.study_id()},
             {"concordance", to_string(v.concordance())},
             {"status", to_string(v.status())},
             {"enqueued_at", v.enqueued_at()}};
}

void from_json(const json& j, triage_item& v) {
    try {
        v = triage_item(get_id(j, "study_id"),
                        parse_concordance_class(get_string(j, "concordance")),
                        get_time(j, "enqueued_at"),
                        parse_triage_status(get_string(j, "status")));
    } catch (const error& e) {
        if (e.code() == error_code::not_discordant) {
            fail(e.what());
        }
        throw;
    }
}

void to_json(json& j, const adjudication& v) {
    j = json{{"study_id", v.study_id},
             {"reviewer_id", v.reviewer_id},
             {"outcome", to_string(v.outcome)},
             {"decided_at", v.decided_at}};
    if (v.note) {
        j["note"] = *v.note;
    }
    if (v.amendment) {
        j["amendment"] = true;
    }
}

void from_json(const json& j, adjudication& v) {
    v.study_id = get_id(j, "study_id");
    v.reviewer_id = get_id(j, "reviewer_id");
    v.outcome = parse_adjudication_outcome(get_string(j, "outcome"));
    v.note.reset();
    if (const auto* n = optional_field(j, "note")) {
        if (!n->is_string()) {
            fail("field 'note' must be a string");
        }
        v.note = n->get<std::string>();
    }
    v.decided_at = get_time(j, "decided_at");
    v.amendment = false;
    if (const auto* a = optional_field(j, "amendment")) {
        if (!a->is_boolean()) {
            fail("field 'amendment' must be a boolean");
        }
        v.amendment = a->get<bool>();
    }
}

auto parse_adjudication_request(const json& j, const std::string& study_id, timestamp now)
    -> adjudication {
    if (!j.is_object()) {
        fail("expected a JSON object");
    }
    json body = j;
    if (auto it = body.find("study_id"); it != body.end() && !it->is_null()) {
        if (!it->is_string() || it->get<std::string>() != study_id) {
            fail("body study_id does not match the path");
        }
    }
    body["study_id"] = study_id;
    if (body.find("decided_at") == body.end() || body["decided_at"].is_null()) {
        body["decided_at"] = now;
    }
    return body.get<adjudication>();
}

void to_json(json& j, const interval& v) { j = json::array({v.lo, v.hi}); }

void to_json(json& j, const qa_metrics& v) {
    j = json{{"cohort_size", v.cohort_size},
             {"ai_positive_total", v.ai_positive_total},
             {"flagged_count", v.flagged_count},
             {"nonflagged_count", v.nonflagged_count},
             {"queue_size", v.queue_size},
             {"missed_flagged", v.missed_flagged},
             {"missed_nonflagged", v.missed_nonflagged},
             {"denominator_flagged", v.denominator_flagged},
             {"denominator_nonflagged", v.denominator_nonflagged},
             {"missed_rate_flagged", v.missed_rate_flagged},
             {"missed_rate_nonflagged", v.missed_rate_nonflagged},
             {"rate_basis", to_string(v.basis)},
             {"effort_reduction", v.effort_reduction},
             {"ci_flagged", v.ci_flagged},
             {"ci_nonflagged", v.ci_nonflagged},
             {"p_value", v.p_value},
             {"z", v.z}};
}

void from_json(const json& j, qa_metrics& v) {
    v.cohort_size = get_count(j, "cohort_size");
    v.ai_positive_total = get_count(j, "ai_positive_total");
    v.flagged_count = get_count(j, "flagged_count");
    v.nonflagged_count = get_count(j, "nonflagged_count");
    v.queue_size = get_count(j, "queue_size");
    v.missed_flagged = get_count(j, "missed_flagged");
    v.missed_nonflagged = get_count(j, "missed_nonflagged");
    v.denominator_flagged = get_count(j, "denominator_flagged");
    v.denominator_nonflagged = get_count(j, "denominator_nonflagged");
    v.missed_rate_flagged = get_number(j, "missed_rate_flagged");
    v.missed_rate_nonflagged = get_number(j, "missed_rate_nonflagged");
    v.basis = parse_rate_basis(get_string(j, "rate_basis"));
    v.effort_reduction = get_number(j, "effort_reduction");
    auto read_interval = [](const json& arr, const char* key) {
        if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() || !arr[1].is_number()) {
            fail(std::string("field '") + key + "' must be [lo, hi]");
        }
        return interval{arr[0].get<double>(), arr[1].get<double>()};
    };
    v.ci_flagged = read_interval(require(j, "ci_flagged"), "ci_flagged");
    v.ci_nonflagged = read_interval(require(j, "ci_nonflagged"), "ci_nonflagged");
    v.p_value = get_number(j, "p_value");
    v.z = get_number(j, "z");
}

auto parse_json_line(std::string_view line) -> json {
    try {
        return json::parse(line);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace aquarius
