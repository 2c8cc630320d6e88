#include <adp/value.hpp>

#include <adp/error.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace adp {

namespace {

auto lowered(std::string_view s) -> std::string {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

auto compare_numbers(const Value& a, const Value& b) -> int {
    if (a.kind() == Kind::Integer && b.kind() == Kind::Integer) {
        return a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
    }
    const double x = a.as_number();
    const double y = b.as_number();
    return x < y ? -1 : (x > y ? 1 : 0);
}

auto kind_rank(Kind k) -> int {
    switch (k) {
    case Kind::Null: return 0;
    case Kind::Boolean: return 1;
    case Kind::Integer:
    case Kind::Real: return 2;
    case Kind::Text: return 3;
    case Kind::List: return 4;
    }
    return 5;
}

} // namespace

auto kind_name(Kind kind) -> std::string_view {
    switch (kind) {
    case Kind::Null: return "null";
    case Kind::Boolean: return "boolean";
    case Kind::Integer: return "integer";
    case Kind::Real: return "real";
    case Kind::Text: return "text";
    case Kind::List: return "list";
    }
    return "?";
}

auto parse_kind(std::string_view name) -> std::optional<Kind> {
    const auto n = lowered(name);
    if (n == "null") return Kind::Null;
    if (n == "boolean" || n == "bool") return Kind::Boolean;
    if (n == "integer" || n == "int" || n == "int64") return Kind::Integer;
    if (n == "real" || n == "float" || n == "double" || n == "float64") return Kind::Real;
    if (n == "text" || n == "str" || n == "string") return Kind::Text;
    if (n == "list") return Kind::List;
    return std::nullopt;
}

Value::Value(double v) : data_(v) {
    if (!std::isfinite(v)) {
        throw TypeError("non-finite real value");
    }
}

Value::Value(List items) {
    for (const auto& item : items) {
        if (item.kind() == Kind::List) {
            throw TypeError("nested lists are not supported");
        }
    }
    data_ = std::move(items);
}

auto Value::as_number() const -> double {
    if (kind() == Kind::Integer) {
        return static_cast<double>(as_int());
    }
    return as_real();
}

auto compare(const Value& a, const Value& b) -> int {
    const int ra = kind_rank(a.kind());
    const int rb = kind_rank(b.kind());
    if (ra != rb) {
        return ra < rb ? -1 : 1;
    }
    switch (a.kind()) {
    case Kind::Null: return 0;
    case Kind::Boolean: return static_cast<int>(a.as_bool()) - static_cast<int>(b.as_bool());
    case Kind::Integer:
    case Kind::Real: return compare_numbers(a, b);
    case Kind::Text: {
        const int c = a.as_text().compare(b.as_text());
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Kind::List: {
        const auto& x = a.as_list();
        const auto& y = b.as_list();
        const auto n = std::min(x.size(), y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (const int c = compare(x[i], y[i]); c != 0) {
                return c;
            }
        }
        return x.size() < y.size() ? -1 : (x.size() > y.size() ? 1 : 0);
    }
    }
    return 0;
}

auto format_real(double v) -> std::string {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string out(buf.data(), ptr);
    if (out.find_first_of(".eEn") == std::string::npos) {
        out += ".0";
    }
    return out;
}

auto render(const Value& v) -> std::string {
    switch (v.kind()) {
    case Kind::Null: return "null";
    case Kind::Boolean: return v.as_bool() ? "true" : "false";
    case Kind::Integer: return std::to_string(v.as_int());
    case Kind::Real: return format_real(v.as_real());
    case Kind::Text: return v.as_text();
    case Kind::List: {
        std::string out = "[";
        const auto& items = v.as_list();
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i > 0) out += ", ";
            out += render(items[i]);
        }
        return out + "]";
    }
    }
    return {};
}

auto parse_int_strict(std::string_view s) -> std::optional<std::int64_t> {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return out;
}

auto parse_real_strict(std::string_view s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(out)) {
        return std::nullopt;
    }
    return out;
}

auto parse_bool_strict(std::string_view s) -> std::optional<bool> {
    const auto n = lowered(s);
    if (n == "true") return true;
    if (n == "false") return false;
    return std::nullopt;
}

auto cast_value(const Value& v, Kind target) -> Value {
    if (v.is_null()) {
        return {};
    }
    auto fail = [&]() -> TypeError {
        return TypeError("cannot cast " + std::string(kind_name(v.kind())) + " '" + render(v) +
                         "' to " + std::string(kind_name(target)));
    };
    switch (target) {
    case Kind::Null: throw fail();
    case Kind::Integer:
        switch (v.kind()) {
        case Kind::Boolean: return Value(static_cast<std::int64_t>(v.as_bool()));
        case Kind::Integer: return v;
        case Kind::Real: {
            const double r = v.as_real();
            if (std::trunc(r) != r || r < -9.2e18 || r > 9.2e18) throw fail();
            return Value(static_cast<std::int64_t>(r));
        }
        case Kind::Text:
            if (auto i = parse_int_strict(v.as_text())) return Value(*i);
            throw fail();
        default: throw fail();
        }
    case Kind::Real:
        switch (v.kind()) {
        case Kind::Boolean: return Value(v.as_bool() ? 1.0 : 0.0);
        case Kind::Integer: return Value(static_cast<double>(v.as_int()));
        case Kind::Real: return v;
        case Kind::Text:
            if (auto r = parse_real_strict(v.as_text())) return Value(*r);
            throw fail();
        default: throw fail();
        }
    case Kind::Text: return Value(render(v));
    case Kind::Boolean:
        switch (v.kind()) {
        case Kind::Boolean: return v;
        case Kind::Integer:
            if (v.as_int() == 0 || v.as_int() == 1) return Value(v.as_int() == 1);
            throw fail();
        case Kind::Text:
            if (auto b = parse_bool_strict(v.as_text())) return Value(*b);
            throw fail();
        default: throw fail();
        }
    case Kind::List:
        if (v.kind() == Kind::List) return v;
        throw fail();
    }
    throw fail();
}

} // namespace adp
