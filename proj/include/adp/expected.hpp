#pragma once

#include <utility>
#include <variant>

namespace adp {

/// Value-or-error return for operations whose failure is an ordinary outcome.
template <class T, class E>
class Expected {
public:
    Expected(T value) : data_(std::in_place_index<0>, std::move(value)) {}
    Expected(E error) : data_(std::in_place_index<1>, std::move(error)) {}

    [[nodiscard]] auto has_value() const -> bool { return data_.index() == 0; }
    explicit operator bool() const { return has_value(); }

    [[nodiscard]] auto value() const& -> const T& { return std::get<0>(data_); }
    [[nodiscard]] auto value() && -> T&& { return std::get<0>(std::move(data_)); }
    [[nodiscard]] auto error() const& -> const E& { return std::get<1>(data_); }

    auto operator*() const& -> const T& { return value(); }
    auto operator->() const -> const T* { return &std::get<0>(data_); }

private:
    std::variant<T, E> data_;
};

} // namespace adp
