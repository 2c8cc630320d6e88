#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace adp {

enum class Kind : std::uint8_t { Null, Boolean, Integer, Real, Text, List };

auto kind_name(Kind kind) -> std::string_view;
/// Accepts the canonical names plus common aliases (int, float, str, bool, ...).
auto parse_kind(std::string_view name) -> std::optional<Kind>;

/// A single table cell. Reals are always finite and lists hold scalars only.
class Value {
public:
    using List = std::vector<Value>;

    Value() = default;
    Value(std::nullptr_t) {}
    Value(bool b) : data_(b) {}
    Value(int v) : data_(static_cast<std::int64_t>(v)) {}
    Value(std::int64_t v) : data_(v) {}
    Value(double v);
    Value(const char* s) : data_(std::string(s)) {}
    Value(std::string s) : data_(std::move(s)) {}
    Value(List items);

    [[nodiscard]] auto kind() const -> Kind { return static_cast<Kind>(data_.index()); }
    [[nodiscard]] auto is_null() const -> bool { return kind() == Kind::Null; }
    [[nodiscard]] auto is_numeric() const -> bool {
        return kind() == Kind::Integer || kind() == Kind::Real;
    }

    [[nodiscard]] auto as_bool() const -> bool { return std::get<bool>(data_); }
    [[nodiscard]] auto as_int() const -> std::int64_t { return std::get<std::int64_t>(data_); }
    [[nodiscard]] auto as_real() const -> double { return std::get<double>(data_); }
    [[nodiscard]] auto as_text() const -> const std::string& { return std::get<std::string>(data_); }
    [[nodiscard]] auto as_list() const -> const List& { return std::get<List>(data_); }
    /// Integer or Real widened to double.
    [[nodiscard]] auto as_number() const -> double;

    /// Exact structural identity (Integer 2 and Real 2.0 are NOT identical).
    [[nodiscard]] auto identical(const Value& other) const -> bool { return data_ == other.data_; }

private:
    std::variant<std::monostate, bool, std::int64_t, double, std::string, List> data_;
};

/// Total order: Null < Boolean < numeric (Integer k == Real k.0) < Text (bytes) < List (elementwise).
auto compare(const Value& a, const Value& b) -> int;

inline auto operator==(const Value& a, const Value& b) -> bool { return compare(a, b) == 0; }
inline auto operator<(const Value& a, const Value& b) -> bool { return compare(a, b) < 0; }

/// Human-facing rendering: null, true/false, shortest round-trip reals, raw text, [a, b].
auto render(const Value& v) -> std::string;
auto format_real(double v) -> std::string;

auto parse_int_strict(std::string_view s) -> std::optional<std::int64_t>;
auto parse_real_strict(std::string_view s) -> std::optional<double>;
auto parse_bool_strict(std::string_view s) -> std::optional<bool>;

/// Converts a non-null value to `target`; throws TypeError with a description on failure.
/// Null maps to Null for every target.
auto cast_value(const Value& v, Kind target) -> Value;

} // namespace adp
