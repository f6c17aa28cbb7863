/**
 * @file config.hpp
 * @brief Service / CLI configuration file
 *
 * JSON object:
 * {
 *   "trial": {"trial_seed": "...", "flag_probability": 0.5,
 *             "review_scope": "AI_POS_NLP_NEG_ONLY", "rate_basis": "AI_POSITIVE"},
 *   "lexicon_path": "data/lexicon_default.json",
 *   "log_path": "aquarius-events.jsonl",
 *   "host": "127.0.0.1", "port": 8080,
 *   "bearer_token": null, "z": 1.96
 * }
 * Every key is optional. Relative paths resolve against the config file's
 * directory.
 */

#pragma once

#include "aquarius/lexicon.hpp"
#include "aquarius/pipeline.hpp"
#include "aquarius/randomizer.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace aquarius {

struct service_config {
    trial::trial_config trial;
    std::optional<std::filesystem::path> lexicon_path;
    std::filesystem::path log_path = "aquarius-events.jsonl";
    std::string host = "127.0.0.1";
    int port = 8080;
    std::optional<std::string> bearer_token;
    double z = 1.96;
};

/// Throws error(invalid_config) or error(io_error).
[[nodiscard]] auto load_service_config(const std::filesystem::path& path) -> service_config;
[[nodiscard]] auto parse_service_config(const nlohmann::json& j,
                                        const std::filesystem::path& base_dir = {})
    -> service_config;

/// The lexicon file named by the config, else the built-in default.
[[nodiscard]] auto resolve_lexicon(const service_config& config) -> nlp::lexicon_config;
[[nodiscard]] auto pipeline_options_for(const service_config& config)
    -> ingest::pipeline_options;

}  // namespace aquarius
