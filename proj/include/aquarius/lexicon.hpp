/**
 * @file lexicon.hpp
 * @brief Editable term and trigger lists driving the report classifier
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace aquarius::nlp {

struct lexicon_config {
    std::string version;
    std::vector<std::string> finding_terms;
    std::vector<std::string> pre_negation_triggers;
    std::vector<std::string> post_negation_triggers;
    std::vector<std::string> uncertainty_triggers;
    std::vector<std::string> pseudo_negation_exceptions;
    std::size_t scope_window = 6;
    /// Tokens whose trailing period does not end a sentence.
    std::vector<std::string> abbreviations;

    auto operator==(const lexicon_config&) const -> bool = default;
};

/// The shipped ICH lexicon; identical to data/lexicon_default.json.
[[nodiscard]] auto default_lexicon() -> lexicon_config;
[[nodiscard]] auto default_abbreviations() -> std::vector<std::string>;

/**
 * @brief Checks the structural invariants of a lexicon.
 *
 * Throws error(empty_lexicon) when finding_terms is empty and
 * error(invalid_lexicon) for any other violation: empty pre-negation or
 * uncertainty lists, scope_window of zero, blank phrases or phrases with
 * leading/trailing whitespace.
 */
void validate_lexicon(const lexicon_config& lexicon);

void to_json(nlohmann::json& j, const lexicon_config& v);
void from_json(const nlohmann::json& j, lexicon_config& v);

/// Reads and validates a lexicon file.
[[nodiscard]] auto load_lexicon(const std::filesystem::path& path) -> lexicon_config;

}  // namespace aquarius::nlp
