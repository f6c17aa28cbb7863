#include "aquarius/config.hpp"

#include "aquarius/error.hpp"

#include <fstream>

namespace aquarius {

auto parse_service_config(const nlohmann::json& j, const std::filesystem::path& base_dir)
    -> service_config {
    if (!j.is_object()) {
        throw error(error_code::invalid_config, "config must be a JSON object");
    }
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    service_config c;
    try {
        if (j.contains("trial")) {
            c.trial = j["trial"].get<trial::trial_config>();
        }
        if (j.contains("lexicon_path") && !j["lexicon_path"].is_null()) {
            c.lexicon_path = resolve(j["lexicon_path"].get<std::string>());
        }
        if (j.contains("log_path")) {
            c.log_path = resolve(j["log_path"].get<std::string>());
        }
        c.host = j.value("host", c.host);
        c.port = j.value("port", c.port);
        if (j.contains("bearer_token") && !j["bearer_token"].is_null()) {
            c.bearer_token = j["bearer_token"].get<std::string>();
        }
        c.z = j.value("z", c.z);
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::invalid_config, std::string("malformed config: ") + e.what());
    }
    if (c.port < 0 || c.port > 65535) {
        throw error(error_code::invalid_config, "port out of range");
    }
    if (!(c.z > 0.0)) {
        throw error(error_code::invalid_config, "z must be positive");
    }
    return c;
}

auto load_service_config(const std::filesystem::path& path) -> service_config {
    std::ifstream in(path);
    if (!in) {
        throw error(error_code::io_error, "cannot open config file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw error(error_code::invalid_config,
                    "config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_service_config(j, path.parent_path());
}

auto resolve_lexicon(const service_config& config) -> nlp::lexicon_config {
    return config.lexicon_path ? nlp::load_lexicon(*config.lexicon_path) : nlp::default_lexicon();
}

auto pipeline_options_for(const service_config& config) -> ingest::pipeline_options {
    return {config.trial, resolve_lexicon(config)};
}

}  // namespace aquarius
