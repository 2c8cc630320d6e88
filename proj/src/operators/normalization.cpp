#include "common.hpp"

#include <adp/datetime.hpp>

namespace adp::ops {

namespace {

auto value_transform(const OperatorInstance& op, const Table& t, const ExecContext& ctx) -> Table {
    const auto col = require_column(t, op.text("column"));
    kernels::EvalOptions opts;
    opts.pass_null_column = col;
    auto cells = guarded([&] { return kernels::evaluate_column(op.expr("func"), t, opts, ctx.policy); });
    Kind dtype = guarded([&] { return infer_column_kind(cells); });
    if (dtype == Kind::Null) dtype = t.schema().columns[col].dtype;
    return replace_column(t, col, std::move(cells), dtype);
}

auto standardize_datetime(const OperatorInstance& op, const Table& t) -> Table {
    const auto col = require_column(t, op.text("column"));
    const auto& format = op.text("format");
    std::vector<Value> cells = t.column_values(col);
    for (std::size_t r = 0; r < cells.size(); ++r) {
        auto& cell = cells[r];
        if (cell.is_null()) continue;
        if (cell.kind() != Kind::Text) {
            throw OpFailure("row " + std::to_string(r) + ": cannot parse " + std::string(kind_name(cell.kind())) +
                                " value '" + render(cell) + "' as a datetime",
                            "row " + std::to_string(r));
        }
        auto dt = parse_datetime_any(cell.as_text());
        if (!dt) {
            throw OpFailure("row " + std::to_string(r) + ": unparseable datetime '" + cell.as_text() + "'",
                            "row " + std::to_string(r));
        }
        cell = Value(format_datetime(*dt, format));
    }
    return replace_column(t, col, std::move(cells), Kind::Text);
}

auto cast_type(const OperatorInstance& op, const Table& t) -> Table {
    const auto col = require_column(t, op.text("column"));
    const Kind target = *parse_kind(op.text("dtype"));
    std::vector<Value> cells = t.column_values(col);
    for (std::size_t r = 0; r < cells.size(); ++r) {
        try {
            cells[r] = cast_value(cells[r], target);
        } catch (const TypeError& e) {
            throw OpFailure("cast failure at row " + std::to_string(r) + ": " + e.what(), "row " + std::to_string(r));
        }
    }
    return replace_column(t, col, std::move(cells), target);
}

} // namespace

auto exec_normalization(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table> {
    const auto& t = require_table(state, op.text("table"));
    switch (op.kind()) {
    case OpKind::ValueTransform: return {value_transform(op, t, ctx)};
    case OpKind::StandardizeDatetime: return {standardize_datetime(op, t)};
    case OpKind::CastType: return {cast_type(op, t)};
    default: throw OpFailure("not a normalization operator", "dispatch");
    }
}

} // namespace adp::ops
