/**
 * @file error.hpp
 * @brief Error codes and the exception type thrown across the library
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aquarius {

enum class error_code {
    invalid_record,
    invalid_timestamp,
    conflicting_duplicate,
    empty_lexicon,
    invalid_lexicon,
    invalid_config,
    not_ai_positive,
    not_discordant,
    unknown_item,
    already_adjudicated,
    incomplete_adjudication,
    zero_denominator,
    zero_cohort,
    invalid_counts,
    corrupt_log,
    io_error,
};

[[nodiscard]] auto to_string(error_code code) -> std::string_view;

class error : public std::runtime_error {
public:
    error(error_code code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] auto code() const noexcept -> error_code { return code_; }

private:
    error_code code_;
};

}  // namespace aquarius
