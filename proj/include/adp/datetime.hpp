#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace adp {

struct DateTime {
    int year = 1970;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;
    int second = 0;

    friend auto operator==(const DateTime&, const DateTime&) -> bool = default;
};

/// strftime-style parsing. Supported directives: %Y (exactly four digits), %y (two digits,
/// 69-99 -> 19xx, 00-68 -> 20xx), %m %d %H %M %S (one or two digits), %b %B (month names,
/// case-insensitive), %%. The whole input must be consumed and the date must exist.
auto parse_datetime(std::string_view text, std::string_view format) -> std::optional<DateTime>;
auto format_datetime(const DateTime& dt, std::string_view format) -> std::string;

/// Input patterns tried in order by StandardizeDatetime.
auto standard_input_patterns() -> std::span<const std::string_view>;
/// First pattern in standard_input_patterns() that parses `text`.
auto parse_datetime_any(std::string_view text) -> std::optional<DateTime>;

auto to_epoch_seconds(const DateTime& dt) -> std::int64_t;
auto from_epoch_seconds(std::int64_t seconds) -> DateTime;

} // namespace adp
