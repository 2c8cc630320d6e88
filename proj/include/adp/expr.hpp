#pragma once

#include <adp/table.hpp>
#include <adp/value.hpp>

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adp {

enum class ExprOp : std::uint8_t {
    Literal,
    Column,
    Neg,
    Not,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Call,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. `name` is the column for Column and the builtin for Call.
struct Expr {
    ExprOp op = ExprOp::Literal;
    Value literal;
    std::string name;
    std::vector<ExprPtr> args;
};

auto make_literal(Value v) -> ExprPtr;
auto make_column(std::string name) -> ExprPtr;
auto make_unary(ExprOp op, ExprPtr operand) -> ExprPtr;
auto make_binary(ExprOp op, ExprPtr lhs, ExprPtr rhs) -> ExprPtr;
/// Throws ParseError for unknown builtins or arity mismatch.
auto make_call(std::string name, std::vector<ExprPtr> args) -> ExprPtr;

/// Names accepted by make_call / the parser.
auto builtin_names() -> std::span<const std::string_view>;

/// Parses DSL source; ParseError::offset() is the byte offset of the offending token.
auto parse_expr(std::string_view src) -> ExprPtr;
/// Canonical source text; parse_expr(print_expr(e)) is structurally equal to e.
auto print_expr(const Expr& e) -> std::string;
auto expr_equal(const Expr& a, const Expr& b) -> bool;
/// Every column referenced through col("...").
auto referenced_columns(const Expr& e) -> std::vector<std::string>;

/// Read-only view of one row. When `visible` is set only those column positions can be referenced.
class RowBinding {
public:
    RowBinding(std::span<const ColumnSpec> columns, std::span<const Value> row,
               std::span<const std::size_t> visible = {}, bool restrict_to_visible = false)
        : columns_(columns), row_(row), visible_(visible), restricted_(restrict_to_visible) {}

    [[nodiscard]] auto lookup(std::string_view name) const -> const Value*;

private:
    std::span<const ColumnSpec> columns_;
    std::span<const Value> row_;
    std::span<const std::size_t> visible_;
    bool restricted_;
};

/// Strict evaluation; null propagates through arithmetic, comparison and string builtins.
/// Throws EvalError naming the offending sub-expression.
auto eval_expr(const Expr& e, const RowBinding& row) -> Value;

} // namespace adp
