/**
 * @file classifier.hpp
 * @brief Rule-based report labeling with negation and uncertainty scope
 */

#pragma once

#include "aquarius/lexicon.hpp"
#include "aquarius/text.hpp"
#include "aquarius/types.hpp"

#include <string_view>
#include <vector>

namespace aquarius::nlp {

/**
 * @brief A lexicon compiled to token sequences, reusable across reports.
 *
 * Finding terms are matched greedily left to right, longest phrase first at
 * each token. A term mention is NEGATED when a pre-negation trigger ends
 * fewer than `scope_window` tokens before it or a post-negation trigger
 * starts fewer than `scope_window` tokens after it. It is UNCERTAIN when an
 * uncertainty trigger is in scope on either side and no negation trigger is
 * strictly closer. Triggers overlapping a pseudo-negation exception phrase
 * are ignored.
 */
class report_classifier {
public:
    /// Validates the lexicon (see validate_lexicon).
    explicit report_classifier(lexicon_config lexicon);

    [[nodiscard]] auto lexicon() const noexcept -> const lexicon_config& { return lexicon_; }
    [[nodiscard]] auto version() const -> std::string;

    /// Spans are relative to `sentence` and carry sentence_index 0.
    [[nodiscard]] auto classify_sentence(std::string_view sentence) const
        -> std::vector<evidence_span>;

    [[nodiscard]] auto classify_report(const report_document& report) const -> nlp_label;

private:
    enum class trigger_role : unsigned { pre_negation = 1, post_negation = 2, uncertainty = 4 };

    struct phrase {
        std::vector<std::string> tokens;
        unsigned roles = 0;
    };

    struct trigger_hit {
        std::size_t first;
        std::size_t last;  // exclusive
        unsigned roles;
    };

    [[nodiscard]] auto longest_match(const std::vector<phrase>& phrases,
                                     const std::vector<token>& tokens, std::size_t at) const
        -> const phrase*;

    lexicon_config lexicon_;
    std::vector<phrase> terms_;
    std::vector<phrase> triggers_;
    std::vector<phrase> exceptions_;
};

/// Labels one sentence with a freshly compiled lexicon.
[[nodiscard]] auto classify_sentence(std::string_view sentence, const lexicon_config& lexicon)
    -> std::vector<evidence_span>;

/**
 * @brief POSITIVE iff any sentence of any section has an AFFIRMED or
 * UNCERTAIN mention; evidence lists every mention found.
 *
 * Throws error(empty_lexicon) when the lexicon has no finding terms.
 */
[[nodiscard]] auto classify_report(const report_document& report, const lexicon_config& lexicon)
    -> nlp_label;

}  // namespace aquarius::nlp
