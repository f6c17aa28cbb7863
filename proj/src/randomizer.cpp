#include "aquarius/randomizer.hpp"

#include "aquarius/cohort_state.hpp"
#include "aquarius/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aquarius::trial {

void validate_trial_config(const trial_config& config) {
    if (config.trial_seed.empty()) {
        throw error(error_code::invalid_config, "trial_seed must be non-empty");
    }
    if (!(config.flag_probability >= 0.0 && config.flag_probability <= 1.0)) {
        throw error(error_code::invalid_config, "flag_probability must lie in [0,1]");
    }
}

void to_json(nlohmann::json& j, const trial_config& v) {
    j = nlohmann::json{{"trial_seed", v.trial_seed},
                       {"flag_probability", v.flag_probability},
                       {"review_scope", to_string(v.scope)},
                       {"rate_basis", to_string(v.basis)},
                       {"finding_code", v.finding_code},
                       {"exam_type", v.exam_type}};
}

void from_json(const nlohmann::json& j, trial_config& v) {
    try {
        const trial_config defaults;
        v.trial_seed = j.value("trial_seed", defaults.trial_seed);
        v.flag_probability = j.value("flag_probability", defaults.flag_probability);
        v.scope = parse_review_scope(j.value("review_scope", std::string(to_string(defaults.scope))));
        v.basis = parse_rate_basis(j.value("rate_basis", std::string(to_string(defaults.basis))));
        v.finding_code = j.value("finding_code", defaults.finding_code);
        v.exam_type = j.value("exam_type", defaults.exam_type);
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::invalid_config, std::string("malformed trial config: ") + e.what());
    } catch (const error& e) {
        throw error(error_code::invalid_config, e.what());
    }
    validate_trial_config(v);
}

auto assignment_hash(std::string_view seed, std::string_view study_id) -> std::uint64_t {
    std::string key;
    key.reserve(seed.size() + 1 + study_id.size());
    key.append(seed).append(":").append(study_id);
    return mix64(fnv1a64(key));
}

auto hash_flagged(std::string_view seed, std::string_view study_id, double probability) -> bool {
    // long double carries a 64-bit mantissa on the supported targets, so both
    // sides are exact and p = 0 / p = 1 behave as hard boundaries.
    static_assert(std::numeric_limits<long double>::digits >= 64);
    const long double h = static_cast<long double>(assignment_hash(seed, study_id));
    const long double threshold = static_cast<long double>(probability) * 0x1p64L;
    return h < threshold;
}

auto assign_arm(const ai_finding& finding, const trial_config& config) -> arm_assignment {
    if (!finding.ai_positive) {
        throw error(error_code::not_ai_positive,
                    "study '" + finding.study_id + "' has no AI-positive finding");
    }
    arm_assignment a;
    a.study_id = finding.study_id;
    a.trial_seed = config.trial_seed;
    a.assigned_at = finding.received_at;
    if (finding.flagged_override) {
        a.flagged = *finding.flagged_override;
        a.source = assignment_source::override;
    } else {
        a.flagged = hash_flagged(config.trial_seed, finding.study_id, config.flag_probability);
        a.source = assignment_source::hash;
    }
    return a;
}

auto worklist_view(const cohort_state& state) -> std::vector<worklist_entry> {
    std::vector<const study_record*> ordered;
    ordered.reserve(state.studies.size());
    for (const auto& [id, s] : state.studies) {
        ordered.push_back(&s);
    }
    std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
        return a->acquired_at != b->acquired_at ? a->acquired_at < b->acquired_at
                                                : a->study_id < b->study_id;
    });

    std::vector<worklist_entry> out;
    out.reserve(ordered.size());
    for (const auto* s : ordered) {
        bool shown = false;
        if (auto it = state.assignments.find(s->study_id); it != state.assignments.end()) {
            shown = it->second.flagged;
        }
        out.push_back({s->study_id, shown});
    }
    return out;
}

}  // namespace aquarius::trial
