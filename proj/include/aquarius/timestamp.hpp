/**
 * @file timestamp.hpp
 * @brief UTC instant with RFC 3339 parsing and canonical formatting
 */

#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace aquarius {

/**
 * @brief A UTC instant at microsecond resolution.
 *
 * Formats canonically as "YYYY-MM-DDTHH:MM:SS[.ffffff]Z"; the fractional
 * part is emitted only when non-zero, so format/parse round-trips.
 */
class timestamp {
public:
    using clock_type = std::chrono::system_clock;
    using duration = std::chrono::microseconds;
    using time_point = std::chrono::time_point<clock_type, duration>;

    constexpr timestamp() = default;
    constexpr explicit timestamp(time_point tp) : tp_(tp) {}

    /// Throws error(invalid_timestamp) on malformed input.
    [[nodiscard]] static auto parse(std::string_view text) -> timestamp;
    [[nodiscard]] static auto try_parse(std::string_view text) -> std::optional<timestamp>;
    [[nodiscard]] static auto now() -> timestamp;
    [[nodiscard]] static auto from_unix_seconds(std::int64_t seconds) -> timestamp;

    /// UTC with a Z suffix; a non-zero fraction prints as six digits.
    [[nodiscard]] auto to_string() const -> std::string;
    [[nodiscard]] constexpr auto time() const noexcept -> time_point { return tp_; }
    [[nodiscard]] constexpr auto unix_micros() const noexcept -> std::int64_t {
        return tp_.time_since_epoch().count();
    }

    [[nodiscard]] auto operator+(std::chrono::microseconds d) const -> timestamp {
        return timestamp{tp_ + d};
    }

    constexpr auto operator<=>(const timestamp&) const = default;

private:
    time_point tp_{};
};

}  // namespace aquarius
