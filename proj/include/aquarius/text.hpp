/**
 * @file text.hpp
 * @brief Report segmentation: sections, sentences and tokens
 *
 * All offsets are byte offsets into the UTF-8 input. Tokens are maximal runs
 * of ASCII alphanumerics or non-ASCII bytes, lowercased.
 */

#pragma once

#include "aquarius/types.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aquarius::nlp {

struct token {
    std::string text;  ///< lowercased
    byte_range range;

    auto operator==(const token&) const -> bool = default;
};

[[nodiscard]] auto tokenize(std::string_view text) -> std::vector<token>;

/// Tokenizes a lexicon phrase into its lowercase word sequence.
[[nodiscard]] auto phrase_tokens(std::string_view phrase) -> std::vector<std::string>;

enum class section_kind { findings, impression, body, other };

struct section_span {
    section_kind kind = section_kind::body;
    std::string name;  ///< canonical upper-case header name, "BODY" for the preamble
    byte_range range;

    auto operator==(const section_span&) const -> bool = default;
};

[[nodiscard]] auto to_string(section_kind k) -> std::string_view;

/**
 * @brief Splits report text into covering, ordered, non-overlapping sections.
 *
 * Recognized headers ("FINDINGS:", "IMPRESSION:", "TECHNIQUE:",
 * "COMPARISON:", "INDICATION:") match case-insensitively anywhere at a word
 * boundary. An upper-case label followed by ':' at the start of a line is an
 * unrecognized header and becomes OTHER. A section starts at its header's
 * first byte and ends where the next header starts; anything before the
 * first header is BODY.
 */
[[nodiscard]] auto segment_sections(std::string_view text) -> std::vector<section_span>;

/**
 * @brief Sentence boundaries at '.', '!', '?' and newline runs.
 *
 * A period does not end a sentence when it sits between two digits or
 * terminates a single letter or one of `abbreviations` (compared
 * case-insensitively). Returned ranges are trimmed of surrounding whitespace
 * and blank sentences are dropped.
 */
[[nodiscard]] auto split_sentences(std::string_view text,
                                   std::span<const std::string> abbreviations)
    -> std::vector<byte_range>;

[[nodiscard]] auto split_sentences(std::string_view text) -> std::vector<byte_range>;

}  // namespace aquarius::nlp
