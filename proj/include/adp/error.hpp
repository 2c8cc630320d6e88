#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace adp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (DSL, operator calls, protocol blocks). `offset` is a byte offset into
/// the source, or a 1-based line number when raised by a line-oriented parser.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset)
        : Error(std::move(message)), offset_(offset) {}

    [[nodiscard]] auto offset() const -> std::size_t { return offset_; }

private:
    std::size_t offset_;
};

/// Raised while evaluating a DSL expression; `subexpr` is the printed offending node.
class EvalError : public Error {
public:
    EvalError(std::string message, std::string subexpr)
        : Error(message + " in `" + subexpr + "`"), subexpr_(std::move(subexpr)) {}

    [[nodiscard]] auto subexpr() const -> const std::string& { return subexpr_; }

private:
    std::string subexpr_;
};

class TypeError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace adp
