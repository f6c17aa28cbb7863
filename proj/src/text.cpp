#include "aquarius/text.hpp"

#include "aquarius/lexicon.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

namespace aquarius::nlp {

namespace {

auto is_word_byte(char c) -> bool {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u);
}

auto is_space(char c) -> bool {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

auto lower(std::string_view s) -> std::string {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

struct known_header {
    std::string_view name;
    section_kind kind;
};

constexpr std::array<known_header, 5> known_headers{{
    {"FINDINGS", section_kind::findings},
    {"IMPRESSION", section_kind::impression},
    {"TECHNIQUE", section_kind::other},
    {"COMPARISON", section_kind::other},
    {"INDICATION", section_kind::other},
}};

struct header_hit {
    std::size_t start;
    section_kind kind;
    std::string name;
    std::size_t past_colon;
};

// Header keyword at `pos` followed by optional blanks and ':'.
auto match_known(std::string_view text, std::size_t pos) -> std::optional<header_hit> {
    for (const auto& h : known_headers) {
        if (pos + h.name.size() > text.size()) {
            continue;
        }
        bool same = true;
        for (std::size_t i = 0; i < h.name.size(); ++i) {
            if (std::toupper(static_cast<unsigned char>(text[pos + i])) != h.name[i]) {
                same = false;
                break;
            }
        }
        if (!same) {
            continue;
        }
        std::size_t j = pos + h.name.size();
        while (j < text.size() && (text[j] == ' ' || text[j] == '\t')) {
            ++j;
        }
        if (j < text.size() && text[j] == ':') {
            return header_hit{pos, h.kind, std::string(h.name), j + 1};
        }
    }
    return std::nullopt;
}

// Upper-case label (letters, spaces, '/', '&') of 2..40 bytes ending in ':'.
auto match_unknown(std::string_view text, std::size_t pos) -> std::optional<header_hit> {
    if (pos >= text.size() || !std::isupper(static_cast<unsigned char>(text[pos]))) {
        return std::nullopt;
    }
    std::size_t j = pos;
    while (j < text.size() && j - pos <= 40) {
        const auto c = static_cast<unsigned char>(text[j]);
        if (std::isupper(c) || c == ' ' || c == '/' || c == '&') {
            ++j;
        } else {
            break;
        }
    }
    if (j >= text.size() || text[j] != ':' || j - pos < 2) {
        return std::nullopt;
    }
    auto end = j;
    while (end > pos && text[end - 1] == ' ') {
        --end;
    }
    return header_hit{pos, section_kind::other, std::string(text.substr(pos, end - pos)), j + 1};
}

auto at_line_start(std::string_view text, std::size_t pos) -> bool {
    while (pos > 0) {
        const char c = text[pos - 1];
        if (c == '\n' || c == '\r') {
            return true;
        }
        if (c != ' ' && c != '\t') {
            return false;
        }
        --pos;
    }
    return true;
}

}  // namespace

auto tokenize(std::string_view text) -> std::vector<token> {
    std::vector<token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_word_byte(text[i])) {
            ++i;
            continue;
        }
        const auto start = i;
        while (i < text.size() && is_word_byte(text[i])) {
            ++i;
        }
        out.push_back({lower(text.substr(start, i - start)), {start, i}});
    }
    return out;
}

auto phrase_tokens(std::string_view phrase) -> std::vector<std::string> {
    std::vector<std::string> out;
    for (auto& t : tokenize(phrase)) {
        out.push_back(std::move(t.text));
    }
    return out;
}

auto to_string(section_kind k) -> std::string_view {
    switch (k) {
        case section_kind::findings: return "FINDINGS";
        case section_kind::impression: return "IMPRESSION";
        case section_kind::body: return "BODY";
        case section_kind::other: return "OTHER";
    }
    return "?";
}

auto segment_sections(std::string_view text) -> std::vector<section_span> {
    std::vector<header_hit> hits;
    std::size_t i = 0;
    while (i < text.size()) {
        const bool boundary = i == 0 || !is_word_byte(text[i - 1]);
        if (boundary && is_word_byte(text[i])) {
            auto hit = match_known(text, i);
            if (!hit && at_line_start(text, i)) {
                hit = match_unknown(text, i);
            }
            if (hit) {
                i = hit->past_colon;
                hits.push_back(std::move(*hit));
                continue;
            }
        }
        ++i;
    }

    std::vector<section_span> out;
    if (hits.empty() || hits.front().start > 0) {
        const auto end = hits.empty() ? text.size() : hits.front().start;
        out.push_back({section_kind::body, "BODY", {0, end}});
    }
    for (std::size_t h = 0; h < hits.size(); ++h) {
        const auto end = h + 1 < hits.size() ? hits[h + 1].start : text.size();
        out.push_back({hits[h].kind, hits[h].name, {hits[h].start, end}});
    }
    return out;
}

auto split_sentences(std::string_view text, std::span<const std::string> abbreviations)
    -> std::vector<byte_range> {
    auto is_abbreviation = [&](std::size_t period) {
        std::size_t b = period;
        while (b > 0 && is_word_byte(text[b - 1])) {
            --b;
        }
        if (b == period) {
            return false;
        }
        const auto word = lower(text.substr(b, period - b));
        if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))) {
            return true;
        }
        return std::find(abbreviations.begin(), abbreviations.end(), word) !=
               abbreviations.end();
    };
    auto is_decimal = [&](std::size_t period) {
        return period > 0 && period + 1 < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[period - 1])) &&
               std::isdigit(static_cast<unsigned char>(text[period + 1]));
    };

    std::vector<byte_range> raw;
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n' || c == '\r') {
            raw.push_back({start, i});
            while (i < text.size() && (text[i] == '\n' || text[i] == '\r')) {
                ++i;
            }
            start = i;
            continue;
        }
        if (c == '.' || c == '!' || c == '?') {
            if (c == '.' && (is_decimal(i) || is_abbreviation(i))) {
                ++i;
                continue;
            }
            std::size_t j = i + 1;
            while (j < text.size() &&
                   (text[j] == '.' || text[j] == '!' || text[j] == '?' || text[j] == '"' ||
                    text[j] == '\'' || text[j] == ')')) {
                ++j;
            }
            raw.push_back({start, j});
            start = j;
            i = j;
            continue;
        }
        ++i;
    }
    if (start < text.size()) {
        raw.push_back({start, text.size()});
    }

    std::vector<byte_range> out;
    for (auto r : raw) {
        while (r.start < r.end && is_space(text[r.start])) {
            ++r.start;
        }
        while (r.end > r.start && is_space(text[r.end - 1])) {
            --r.end;
        }
        if (r.start < r.end) {
            out.push_back(r);
        }
    }
    return out;
}

auto split_sentences(std::string_view text) -> std::vector<byte_range> {
    static const auto abbreviations = default_abbreviations();
    return split_sentences(text, abbreviations);
}

}  // namespace aquarius::nlp
