#include "aquarius/timestamp.hpp"

#include "aquarius/error.hpp"

#include <cctype>
#include <cstdio>

namespace aquarius {

namespace {

auto digits(std::string_view s, std::size_t pos, std::size_t count) -> std::optional<int> {
    if (pos + count > s.size()) {
        return std::nullopt;
    }
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return std::nullopt;
        }
        value = value * 10 + (s[i] - '0');
    }
    return value;
}

}  // namespace

auto timestamp::try_parse(std::string_view s) -> std::optional<timestamp> {
    using namespace std::chrono;

    // YYYY-MM-DDTHH:MM:SS
    if (s.size() < 20 || s[4] != '-' || s[7] != '-' || s[13] != ':' || s[16] != ':') {
        return std::nullopt;
    }
    if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') {
        return std::nullopt;
    }
    auto y = digits(s, 0, 4);
    auto mo = digits(s, 5, 2);
    auto d = digits(s, 8, 2);
    auto h = digits(s, 11, 2);
    auto mi = digits(s, 14, 2);
    auto sec = digits(s, 17, 2);
    if (!y || !mo || !d || !h || !mi || !sec) {
        return std::nullopt;
    }
    const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                             day{static_cast<unsigned>(*d)}};
    if (!ymd.ok() || *h > 23 || *mi > 59 || *sec > 60) {
        return std::nullopt;
    }

    std::size_t pos = 19;
    std::int64_t micros = 0;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t ndigits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            if (ndigits < 6) {
                micros = micros * 10 + (s[pos] - '0');
            }
            ++ndigits;
            ++pos;
        }
        if (ndigits == 0) {
            return std::nullopt;
        }
        for (std::size_t i = ndigits; i < 6; ++i) {
            micros *= 10;
        }
    }

    std::int64_t offset_minutes = 0;
    if (pos >= s.size()) {
        return std::nullopt;
    }
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        const int sign = s[pos] == '+' ? 1 : -1;
        auto oh = digits(s, pos + 1, 2);
        auto om = digits(s, pos + 4, 2);
        if (!oh || !om || pos + 3 >= s.size() || s[pos + 3] != ':' || *oh > 23 || *om > 59) {
            return std::nullopt;
        }
        offset_minutes = sign * (*oh * 60 + *om);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) {
        return std::nullopt;
    }

    auto tp = time_point_cast<duration>(sys_days{ymd}) + hours{*h} + minutes{*mi} +
              seconds{*sec} + microseconds{micros} - minutes{offset_minutes};
    return timestamp{tp};
}

auto timestamp::parse(std::string_view text) -> timestamp {
    if (auto ts = try_parse(text)) {
        return *ts;
    }
    throw error(error_code::invalid_timestamp,
                "not an RFC 3339 timestamp: '" + std::string(text) + "'");
}

auto timestamp::now() -> timestamp {
    return timestamp{std::chrono::time_point_cast<duration>(clock_type::now())};
}

auto timestamp::from_unix_seconds(std::int64_t seconds) -> timestamp {
    return timestamp{time_point{std::chrono::seconds{seconds}}};
}

auto timestamp::to_string() const -> std::string {
    using namespace std::chrono;
    const auto day_point = floor<days>(tp_);
    const year_month_day ymd{day_point};
    auto rest = tp_ - day_point;
    const auto h = duration_cast<hours>(rest);
    rest -= h;
    const auto m = duration_cast<minutes>(rest);
    rest -= m;
    const auto s = duration_cast<seconds>(rest);
    rest -= s;
    const auto us = rest.count();

    char buf[40];
    int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d",
                          static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                          static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                          static_cast<int>(m.count()), static_cast<int>(s.count()));
    std::string out(buf, static_cast<std::size_t>(n));
    if (us != 0) {
        std::snprintf(buf, sizeof buf, ".%06lld", static_cast<long long>(us));
        out += buf;
    }
    out += 'Z';
    return out;
}

}  // namespace aquarius
