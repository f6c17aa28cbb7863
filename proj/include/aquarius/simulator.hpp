/**
 * @file simulator.hpp
 * @brief Synthetic cohorts, the fixed reference cohort and the random-review baseline
 *
 * Report texts are assembled from template sentences whose classifier label
 * is known by construction under the default lexicon; the sidecar records the
 * intended label and adjudication outcome of every study.
 */

#pragma once

#include "aquarius/json_io.hpp"
#include "aquarius/randomizer.hpp"
#include "aquarius/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace aquarius::sim {

struct sim_params {
    std::size_t n_studies = 1000;
    double ai_positive_rate = 0.2;
    /// P(report is NLP-negative | AI-positive).
    double nlp_neg_given_ai_pos = 0.08;
    /// P(true missed finding | AI-positive, NLP-negative, not an NLP error), per arm.
    double miss_prob_flagged = 0.05;
    double miss_prob_nonflagged = 0.2;
    /// P(report mentions the finding in phrasing the lexicon misses | AI-positive, NLP-negative).
    double nlp_error_rate = 0.2;
    std::string seed = "aquarius-sim";
    /// Arms come from this trial's hash assignment.
    trial::trial_config trial;

    auto operator==(const sim_params&) const -> bool = default;
};

/// Throws error(invalid_config) for probabilities outside [0,1] or n_studies == 0.
void validate_sim_params(const sim_params& p);

void to_json(json& j, const sim_params& v);
void from_json(const json& j, sim_params& v);

/// What the generator intended for one study.
struct ground_truth {
    std::string study_id;
    bool ai_positive = false;
    std::optional<bool> flagged;  ///< AI-positive studies only
    nlp_label_value intended_label = nlp_label_value::negative;
    bool has_finding = false;  ///< a hemorrhage is truly present
    bool reported = false;     ///< the report describes it
    std::optional<adjudication_outcome> intended_outcome;

    [[nodiscard]] auto missed() const noexcept -> bool {
        return intended_outcome == adjudication_outcome::true_positive_missed;
    }

    auto operator==(const ground_truth&) const -> bool = default;
};

void to_json(json& j, const ground_truth& v);
void from_json(const json& j, ground_truth& v);

struct cohort_bundle {
    std::vector<study_record> studies;
    std::vector<ai_finding> findings;
    std::vector<report_document> reports;
    std::vector<ground_truth> sidecar;
    /// The intended verdict for every queued study.
    std::vector<adjudication> script;
};

[[nodiscard]] auto generate_cohort(const sim_params& params) -> cohort_bundle;

/**
 * @brief The 1936-study reference cohort.
 *
 * 381 AI-positive studies, 190 of them flagged by override; 29 reports the
 * classifier reads as negative for AI-positive studies, of which 6 describe
 * the finding in non-lexicon phrasing; the script adjudicates 6 true misses
 * (1 flagged, 5 non-flagged), 6 NLP errors (3 per arm) and 17 AI false positives.
 */
[[nodiscard]] auto reference_fixture() -> cohort_bundle;

/// File names used by write_bundle.
inline constexpr std::string_view studies_file = "studies.jsonl";
inline constexpr std::string_view findings_file = "findings.jsonl";
inline constexpr std::string_view reports_file = "reports.jsonl";
inline constexpr std::string_view script_file = "adjudications.jsonl";
inline constexpr std::string_view sidecar_file = "sidecar.jsonl";

/// Writes the five JSON-lines files into `dir` (created if missing).
void write_bundle(const cohort_bundle& bundle, const std::filesystem::path& dir);

/// Throws error(io_error) or error(invalid_record).
[[nodiscard]] auto read_sidecar(const std::filesystem::path& path) -> std::vector<ground_truth>;

struct baseline_report {
    std::string seed;
    std::size_t trials = 0;
    std::size_t cohort_size = 0;
    std::size_t true_misses = 0;
    double review_fraction = 0.0;
    std::size_t sample_size = 0;  ///< studies reviewed per trial
    double mean_detected = 0.0;
    double sd_detected = 0.0;
    double mean_fraction_detected = 0.0;  ///< of all true misses
    double expected_detected = 0.0;       ///< true_misses * sample_size / cohort_size
    std::size_t aquarius_queue_size = 0;
    std::size_t aquarius_detected = 0;

    auto operator==(const baseline_report&) const -> bool = default;
};

void to_json(json& j, const baseline_report& v);

/**
 * @brief Monte Carlo random peer review over a ground-truth sidecar.
 *
 * Each trial reviews round(review_fraction * N) studies drawn uniformly
 * without replacement (at least one) and counts the true misses found.
 * Trial i uses the stream seeded by seed + ":" + i. Throws
 * error(invalid_config) unless 0 < review_fraction <= 1, trials >= 1 and the
 * sidecar is non-empty.
 */
[[nodiscard]] auto random_review_baseline(const std::vector<ground_truth>& sidecar,
                                          double review_fraction, std::string_view seed,
                                          std::size_t trials) -> baseline_report;

/// Deterministic stream used by the generator and the baseline.
class rng {
public:
    explicit rng(std::string_view seed);

    [[nodiscard]] auto next() -> std::uint64_t;
    /// Uniform on [0,1) with 53 random bits.
    [[nodiscard]] auto uniform() -> double;
    /// Uniform on [0, n) without modulo bias; n > 0.
    [[nodiscard]] auto below(std::uint64_t n) -> std::uint64_t;
    [[nodiscard]] auto bernoulli(double p) -> bool { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace aquarius::sim
