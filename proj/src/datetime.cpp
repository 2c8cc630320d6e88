#include <adp/datetime.hpp>

#include <array>
#include <cctype>

namespace adp {

namespace {

constexpr std::array<std::string_view, 12> kMonthNames{
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};

constexpr std::array<std::string_view, 12> kMonthDisplay{
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

constexpr std::array<std::string_view, 13> kPatterns{
    "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d", "%Y/%m/%d", "%m/%d/%Y",
    "%d-%m-%Y",          "%m/%d/%y",          "%B %d, %Y", "%B %d %Y", "%d %B %Y",
    "%B %Y",             "%Y.%m.%d",          "%d.%m.%Y"};

auto is_leap(int y) -> bool { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

auto days_in_month(int y, int m) -> int {
    constexpr std::array<int, 12> days{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : days[static_cast<std::size_t>(m - 1)];
}

// Howard Hinnant's civil-calendar conversions.
auto days_from_civil(std::int64_t y, unsigned m, unsigned d) -> std::int64_t {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2));
}

auto read_digits(std::string_view text, std::size_t& pos, std::size_t min_len, std::size_t max_len,
                 int& out) -> bool {
    std::size_t n = 0;
    int value = 0;
    while (n < max_len && pos + n < text.size() && std::isdigit(static_cast<unsigned char>(text[pos + n]))) {
        value = value * 10 + (text[pos + n] - '0');
        ++n;
    }
    if (n < min_len) return false;
    pos += n;
    out = value;
    return true;
}

auto read_month_name(std::string_view text, std::size_t& pos, int& out) -> bool {
    auto matches = [&](std::string_view name) {
        if (pos + name.size() > text.size()) return false;
        for (std::size_t i = 0; i < name.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(text[pos + i])) != name[i]) return false;
        }
        return true;
    };
    for (std::size_t m = 0; m < kMonthNames.size(); ++m) {
        if (matches(kMonthNames[m])) {
            pos += kMonthNames[m].size();
            out = static_cast<int>(m) + 1;
            return true;
        }
    }
    for (std::size_t m = 0; m < kMonthNames.size(); ++m) {
        if (matches(kMonthNames[m].substr(0, 3))) {
            pos += 3;
            out = static_cast<int>(m) + 1;
            return true;
        }
    }
    return false;
}

auto two_digits(int v) -> std::string {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

} // namespace

auto parse_datetime(std::string_view text, std::string_view format) -> std::optional<DateTime> {
    DateTime dt;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < format.size(); ++i) {
        const char f = format[i];
        if (f != '%') {
            if (pos >= text.size() || text[pos] != f) return std::nullopt;
            ++pos;
            continue;
        }
        if (++i >= format.size()) return std::nullopt;
        bool ok = true;
        switch (format[i]) {
        case 'Y': ok = read_digits(text, pos, 4, 4, dt.year); break;
        case 'y': {
            int yy = 0;
            ok = read_digits(text, pos, 2, 2, yy);
            dt.year = yy >= 69 ? 1900 + yy : 2000 + yy;
            break;
        }
        case 'm': ok = read_digits(text, pos, 1, 2, dt.month); break;
        case 'd': ok = read_digits(text, pos, 1, 2, dt.day); break;
        case 'H': ok = read_digits(text, pos, 1, 2, dt.hour); break;
        case 'M': ok = read_digits(text, pos, 1, 2, dt.minute); break;
        case 'S': ok = read_digits(text, pos, 1, 2, dt.second); break;
        case 'b':
        case 'B': ok = read_month_name(text, pos, dt.month); break;
        case '%': ok = pos < text.size() && text[pos++] == '%'; break;
        default: return std::nullopt;
        }
        if (!ok) return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;
    if (dt.month < 1 || dt.month > 12 || dt.day < 1 || dt.day > days_in_month(dt.year, dt.month) ||
        dt.hour > 23 || dt.minute > 59 || dt.second > 59) {
        return std::nullopt;
    }
    return dt;
}

auto format_datetime(const DateTime& dt, std::string_view format) -> std::string {
    std::string out;
    for (std::size_t i = 0; i < format.size(); ++i) {
        if (format[i] != '%' || i + 1 >= format.size()) {
            out += format[i];
            continue;
        }
        switch (format[++i]) {
        case 'Y': {
            std::string y = std::to_string(dt.year);
            while (y.size() < 4) y.insert(0, "0");
            out += y;
            break;
        }
        case 'y': out += two_digits(((dt.year % 100) + 100) % 100); break;
        case 'm': out += two_digits(dt.month); break;
        case 'd': out += two_digits(dt.day); break;
        case 'H': out += two_digits(dt.hour); break;
        case 'M': out += two_digits(dt.minute); break;
        case 'S': out += two_digits(dt.second); break;
        case 'B': out += kMonthDisplay[static_cast<std::size_t>(dt.month - 1)]; break;
        case 'b': out += kMonthDisplay[static_cast<std::size_t>(dt.month - 1)].substr(0, 3); break;
        case '%': out += '%'; break;
        default:
            out += '%';
            out += format[i];
        }
    }
    return out;
}

auto standard_input_patterns() -> std::span<const std::string_view> { return kPatterns; }

auto parse_datetime_any(std::string_view text) -> std::optional<DateTime> {
    for (auto pattern : kPatterns) {
        if (auto dt = parse_datetime(text, pattern)) {
            return dt;
        }
    }
    return std::nullopt;
}

auto to_epoch_seconds(const DateTime& dt) -> std::int64_t {
    const auto days = days_from_civil(dt.year, static_cast<unsigned>(dt.month), static_cast<unsigned>(dt.day));
    return days * 86400 + dt.hour * 3600 + dt.minute * 60 + dt.second;
}

auto from_epoch_seconds(std::int64_t seconds) -> DateTime {
    std::int64_t days = seconds / 86400;
    std::int64_t rem = seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    DateTime dt;
    civil_from_days(days, dt.year, dt.month, dt.day);
    dt.hour = static_cast<int>(rem / 3600);
    dt.minute = static_cast<int>((rem % 3600) / 60);
    dt.second = static_cast<int>(rem % 60);
    return dt;
}

} // namespace adp
