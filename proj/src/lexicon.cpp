#include "aquarius/lexicon.hpp"

#include "aquarius/error.hpp"

#include <cctype>
#include <fstream>

namespace aquarius::nlp {

auto default_abbreviations() -> std::vector<std::string> {
    return {"dr", "mr", "mrs", "ms", "cm", "mm", "vs", "approx", "fig", "st", "sr", "jr"};
}

auto default_lexicon() -> lexicon_config {
    lexicon_config lex;
    lex.version = "ich-rules-1.0";
    lex.finding_terms = {
        "intracranial hemorrhage", "intracranial haemorrhage", "subdural hematoma",
        "subdural hemorrhage",     "epidural hematoma",        "subarachnoid hemorrhage",
        "intraparenchymal hemorrhage", "intraventricular hemorrhage", "hemorrhagic contusion",
        "hemorrhage",              "haemorrhage",              "hematoma",
        "bleed",                   "sah",                      "sdh",
        "edh",                     "iph",                      "ivh",
    };
    lex.pre_negation_triggers = {"no",          "no evidence of", "without",  "negative for",
                                 "absence of",  "rules out",      "ruled out", "free of"};
    lex.post_negation_triggers = {"not seen", "not identified", "is excluded", "has resolved"};
    lex.uncertainty_triggers = {"cannot be excluded", "cannot exclude", "possible",
                                "probable",           "may represent",  "concerning for",
                                "suspicious for",     "question of"};
    lex.pseudo_negation_exceptions = {"no change", "no significant change", "no interval change",
                                      "not excluded"};
    lex.scope_window = 6;
    lex.abbreviations = default_abbreviations();
    return lex;
}

namespace {

void check_phrases(const std::vector<std::string>& phrases, const char* list) {
    for (const auto& p : phrases) {
        const bool blank = p.find_first_not_of(" \t\r\n") == std::string::npos;
        if (blank || std::isspace(static_cast<unsigned char>(p.front())) ||
            std::isspace(static_cast<unsigned char>(p.back()))) {
            throw error(error_code::invalid_lexicon,
                        std::string("phrase '") + p + "' in " + list +
                            " is blank or has leading/trailing whitespace");
        }
    }
}

}  // namespace

void validate_lexicon(const lexicon_config& lexicon) {
    if (lexicon.finding_terms.empty()) {
        throw error(error_code::empty_lexicon, "lexicon has no finding_terms");
    }
    if (lexicon.pre_negation_triggers.empty()) {
        throw error(error_code::invalid_lexicon, "lexicon has no pre_negation_triggers");
    }
    if (lexicon.uncertainty_triggers.empty()) {
        throw error(error_code::invalid_lexicon, "lexicon has no uncertainty_triggers");
    }
    if (lexicon.scope_window < 1) {
        throw error(error_code::invalid_lexicon, "scope_window must be >= 1");
    }
    check_phrases(lexicon.finding_terms, "finding_terms");
    check_phrases(lexicon.pre_negation_triggers, "pre_negation_triggers");
    check_phrases(lexicon.post_negation_triggers, "post_negation_triggers");
    check_phrases(lexicon.uncertainty_triggers, "uncertainty_triggers");
    check_phrases(lexicon.pseudo_negation_exceptions, "pseudo_negation_exceptions");
    check_phrases(lexicon.abbreviations, "abbreviations");
}

void to_json(nlohmann::json& j, const lexicon_config& v) {
    j = nlohmann::json{{"version", v.version},
                       {"finding_terms", v.finding_terms},
                       {"pre_negation_triggers", v.pre_negation_triggers},
                       {"post_negation_triggers", v.post_negation_triggers},
                       {"uncertainty_triggers", v.uncertainty_triggers},
                       {"pseudo_negation_exceptions", v.pseudo_negation_exceptions},
                       {"scope_window", v.scope_window},
                       {"abbreviations", v.abbreviations}};
}

void from_json(const nlohmann::json& j, lexicon_config& v) {
    try {
        v.version = j.at("version").get<std::string>();
        v.finding_terms = j.at("finding_terms").get<std::vector<std::string>>();
        v.pre_negation_triggers = j.at("pre_negation_triggers").get<std::vector<std::string>>();
        v.post_negation_triggers =
            j.value("post_negation_triggers", std::vector<std::string>{});
        v.uncertainty_triggers = j.at("uncertainty_triggers").get<std::vector<std::string>>();
        v.pseudo_negation_exceptions =
            j.value("pseudo_negation_exceptions", std::vector<std::string>{});
        const auto& window = j.at("scope_window");
        if (!window.is_number_integer() || window.get<long long>() < 1) {
            throw error(error_code::invalid_lexicon, "scope_window must be a positive integer");
        }
        v.scope_window = window.get<std::size_t>();
        v.abbreviations = j.value("abbreviations", default_abbreviations());
    } catch (const nlohmann::json::exception& e) {
        throw error(error_code::invalid_lexicon, std::string("malformed lexicon: ") + e.what());
    }
}

auto load_lexicon(const std::filesystem::path& path) -> lexicon_config {
    std::ifstream in(path);
    if (!in) {
        throw error(error_code::io_error, "cannot open lexicon file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw error(error_code::invalid_lexicon,
                    "lexicon file " + path.string() + " is not valid JSON: " + e.what());
    }
    auto lex = j.get<lexicon_config>();
    validate_lexicon(lex);
    return lex;
}

}  // namespace aquarius::nlp
