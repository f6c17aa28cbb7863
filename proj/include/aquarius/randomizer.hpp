/**
 * @file randomizer.hpp
 * @brief Seeded per-case flagging of AI-positive studies
 *
 * An assignment depends only on the trial seed and the study's own id, so it
 * survives out-of-order ingestion, cohort growth and log replay.
 */

#pragma once

#include "aquarius/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace aquarius {
struct cohort_state;
}

namespace aquarius::trial {

struct trial_config {
    std::string trial_seed = "aquarius-ich";
    double flag_probability = 0.5;
    review_scope scope = review_scope::ai_pos_nlp_neg_only;
    rate_basis basis = rate_basis::ai_positive;
    /// Expected finding_code on AI findings; empty accepts any.
    std::string finding_code = std::string(default_finding_code);
    /// Expected study exam_type; empty accepts any.
    std::string exam_type = std::string(default_exam_type);

    auto operator==(const trial_config&) const -> bool = default;
};

/// Throws error(invalid_config) for an empty seed or probability outside [0,1].
void validate_trial_config(const trial_config& config);

void to_json(nlohmann::json& j, const trial_config& v);
void from_json(const nlohmann::json& j, trial_config& v);

[[nodiscard]] constexpr auto fnv1a64(std::string_view bytes) noexcept -> std::uint64_t {
    std::uint64_t h = 14695981039346656037ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

/// 64-bit avalanche finalizer (MurmurHash3 fmix64).
[[nodiscard]] constexpr auto mix64(std::uint64_t k) noexcept -> std::uint64_t {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

/// mix64(fnv1a64(seed + ":" + study_id)).
[[nodiscard]] auto assignment_hash(std::string_view seed, std::string_view study_id)
    -> std::uint64_t;

/// u = hash / 2^64; flagged iff u < probability, evaluated exactly.
[[nodiscard]] auto hash_flagged(std::string_view seed, std::string_view study_id,
                                double probability) -> bool;

/**
 * @brief Worklist arm for an AI-positive finding.
 *
 * A flagged_override on the finding wins over the hash. assigned_at is the
 * finding's received_at. Throws error(not_ai_positive) otherwise.
 */
[[nodiscard]] auto assign_arm(const ai_finding& finding, const trial_config& config)
    -> arm_assignment;

struct worklist_entry {
    std::string study_id;
    bool flag_shown = false;

    auto operator==(const worklist_entry&) const -> bool = default;
};

/// Every study, ordered by acquisition time then id; flag shown for flagged arm only.
[[nodiscard]] auto worklist_view(const cohort_state& state) -> std::vector<worklist_entry>;

}  // namespace aquarius::trial
