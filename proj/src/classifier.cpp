#include "aquarius/classifier.hpp"

#include "aquarius/error.hpp"

#include <algorithm>
#include <limits>

namespace aquarius::nlp {

report_classifier::report_classifier(lexicon_config lexicon) : lexicon_(std::move(lexicon)) {
    validate_lexicon(lexicon_);

    auto add = [](std::vector<phrase>& into, const std::string& text, unsigned roles) {
        auto toks = phrase_tokens(text);
        if (toks.empty()) {
            return;
        }
        for (auto& p : into) {
            if (p.tokens == toks) {
                p.roles |= roles;
                return;
            }
        }
        into.push_back({std::move(toks), roles});
    };

    for (const auto& t : lexicon_.finding_terms) {
        add(terms_, t, 0);
    }
    for (const auto& t : lexicon_.pre_negation_triggers) {
        add(triggers_, t, static_cast<unsigned>(trigger_role::pre_negation));
    }
    for (const auto& t : lexicon_.post_negation_triggers) {
        add(triggers_, t, static_cast<unsigned>(trigger_role::post_negation));
    }
    for (const auto& t : lexicon_.uncertainty_triggers) {
        add(triggers_, t, static_cast<unsigned>(trigger_role::uncertainty));
    }
    for (const auto& t : lexicon_.pseudo_negation_exceptions) {
        add(exceptions_, t, 0);
    }
    if (terms_.empty()) {
        throw error(error_code::empty_lexicon, "lexicon finding_terms contain no words");
    }
}

auto report_classifier::version() const -> std::string {
    return "aquarius-rules/" + lexicon_.version;
}

auto report_classifier::longest_match(const std::vector<phrase>& phrases,
                                      const std::vector<token>& tokens, std::size_t at) const
    -> const phrase* {
    const phrase* best = nullptr;
    for (const auto& p : phrases) {
        if (at + p.tokens.size() > tokens.size()) {
            continue;
        }
        if (best && p.tokens.size() <= best->tokens.size()) {
            continue;
        }
        bool same = true;
        for (std::size_t k = 0; k < p.tokens.size(); ++k) {
            if (tokens[at + k].text != p.tokens[k]) {
                same = false;
                break;
            }
        }
        if (same) {
            best = &p;
        }
    }
    return best;
}

auto report_classifier::classify_sentence(std::string_view sentence) const
    -> std::vector<evidence_span> {
    const auto tokens = tokenize(sentence);

    // Pseudo-negation exception occurrences, as token intervals.
    std::vector<std::pair<std::size_t, std::size_t>> exception_spans;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        for (const auto& p : exceptions_) {
            if (i + p.tokens.size() > tokens.size()) {
                continue;
            }
            bool same = true;
            for (std::size_t k = 0; k < p.tokens.size(); ++k) {
                if (tokens[i + k].text != p.tokens[k]) {
                    same = false;
                    break;
                }
            }
            if (same) {
                exception_spans.emplace_back(i, i + p.tokens.size());
            }
        }
    }
    auto cancelled = [&](std::size_t first, std::size_t last) {
        return std::any_of(exception_spans.begin(), exception_spans.end(), [&](const auto& e) {
            return first < e.second && e.first < last;
        });
    };

    std::vector<trigger_hit> triggers;
    for (std::size_t i = 0; i < tokens.size();) {
        if (const auto* p = longest_match(triggers_, tokens, i)) {
            const auto last = i + p->tokens.size();
            if (!cancelled(i, last)) {
                triggers.push_back({i, last, p->roles});
            }
            i = last;
        } else {
            ++i;
        }
    }

    constexpr auto none = std::numeric_limits<std::size_t>::max();
    const auto window = lexicon_.scope_window;
    const auto has = [](unsigned roles, trigger_role r) {
        return (roles & static_cast<unsigned>(r)) != 0;
    };

    std::vector<evidence_span> out;
    for (std::size_t i = 0; i < tokens.size();) {
        const auto* term = longest_match(terms_, tokens, i);
        if (!term) {
            ++i;
            continue;
        }
        const auto first = i;
        const auto last = i + term->tokens.size();

        std::size_t negation_gap = none;
        std::size_t uncertainty_gap = none;
        for (const auto& t : triggers) {
            std::size_t gap = none;
            bool before = false;
            if (t.last <= first) {
                gap = first - t.last;
                before = true;
            } else if (t.first >= last) {
                gap = t.first - last;
            } else {
                continue;
            }
            if (gap >= window) {
                continue;
            }
            const bool negates = before ? has(t.roles, trigger_role::pre_negation)
                                        : has(t.roles, trigger_role::post_negation);
            if (negates) {
                negation_gap = std::min(negation_gap, gap);
            }
            if (has(t.roles, trigger_role::uncertainty)) {
                uncertainty_gap = std::min(uncertainty_gap, gap);
            }
        }

        auto pol = polarity::affirmed;
        if (uncertainty_gap != none && !(negation_gap < uncertainty_gap)) {
            pol = polarity::uncertain;
        } else if (negation_gap != none) {
            pol = polarity::negated;
        }

        const byte_range range{tokens[first].range.start, tokens[last - 1].range.end};
        out.push_back({0, range, std::string(sentence.substr(range.start, range.size())), pol});
        i = last;
    }
    return out;
}

auto report_classifier::classify_report(const report_document& report) const -> nlp_label {
    nlp_label label;
    label.study_id = report.study_id;
    label.classifier_version = version();
    label.report_finalized_at = report.finalized_at;

    const std::string_view text = report.text;
    std::size_t sentence_index = 0;
    bool positive = false;
    for (const auto& section : segment_sections(text)) {
        const auto body = text.substr(section.range.start, section.range.size());
        for (const auto& s : split_sentences(body, lexicon_.abbreviations)) {
            const auto offset = section.range.start + s.start;
            for (auto span : classify_sentence(body.substr(s.start, s.size()))) {
                span.sentence_index = sentence_index;
                span.range.start += offset;
                span.range.end += offset;
                positive = positive || span.polarity != polarity::negated;
                label.evidence.push_back(std::move(span));
            }
            ++sentence_index;
        }
    }
    label.label = positive ? nlp_label_value::positive : nlp_label_value::negative;
    return label;
}

auto classify_sentence(std::string_view sentence, const lexicon_config& lexicon)
    -> std::vector<evidence_span> {
    return report_classifier(lexicon).classify_sentence(sentence);
}

auto classify_report(const report_document& report, const lexicon_config& lexicon)
    -> nlp_label {
    return report_classifier(lexicon).classify_report(report);
}

}  // namespace aquarius::nlp
