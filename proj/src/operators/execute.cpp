#include "common.hpp"

#include <algorithm>

namespace adp {

namespace {

void precheck_expressions(const OperatorInstance& op, const TableSet& state) {
    const auto& params = op.signature().params;
    const bool has_table = std::any_of(params.begin(), params.end(), [](const ParamSpec& p) {
        return p.name == "table" && p.type == ParamType::Table;
    });
    if (!has_table) return;
    const auto table = state.find(op.text("table"));
    if (!table) return; // reported by the operator itself
    std::optional<std::vector<std::string>> allowed;
    if (op.kind() == OpKind::Concatenate) allowed = op.names("columns");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].type != ParamType::Expr) continue;
        for (const auto& col : referenced_columns(*op.args()[i].expr)) {
            if (!table->column_index(col)) {
                throw ops::OpFailure("column '" + col + "' not found in table '" + table->name() + "'",
                                     "missing column " + col);
            }
            if (allowed && std::find(allowed->begin(), allowed->end(), col) == allowed->end()) {
                throw ops::OpFailure("column '" + col + "' is not among the concatenated columns",
                                     "missing column " + col);
            }
        }
    }
}

auto dispatch(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx) -> std::vector<Table> {
    switch (op.signature().category) {
    case OpCategory::Cleaning: return ops::exec_cleaning(op, state, ctx);
    case OpCategory::Normalization: return ops::exec_normalization(op, state, ctx);
    case OpCategory::SchemaEditing: return ops::exec_schema_edit(op, state, ctx);
    case OpCategory::RowSelection: return ops::exec_row_selection(op, state, ctx);
    case OpCategory::Aggregation: return ops::exec_aggregation(op, state, ctx);
    case OpCategory::Combination: return ops::exec_combination(op, state, ctx);
    case OpCategory::Reshaping: return ops::exec_reshaping(op, state, ctx);
    case OpCategory::ProgramSynthesis: return ops::exec_program_synthesis(op, state, ctx);
    }
    throw ops::OpFailure("unknown operator category", "dispatch");
}

} // namespace

auto execute_operator(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx) -> ExecResult {
    try {
        precheck_expressions(op, state);
        auto tables = ops::guarded([&] { return dispatch(op, state, ctx); });
        TableSet next = state;
        for (auto& t : tables) next.put(std::move(t));
        return next;
    } catch (const ops::OpFailure& e) {
        return ExecError{op, e.what(), e.detail()};
    } catch (const kernels::RowFailure& e) {
        return ExecError{op, e.what(), "row " + std::to_string(e.row())};
    } catch (const EvalError& e) {
        return ExecError{op, e.what(), e.subexpr()};
    } catch (const TypeError& e) {
        return ExecError{op, std::string("type error: ") + e.what(), "type error"};
    } catch (const Error& e) {
        return ExecError{op, e.what(), "error"};
    }
}

auto output_table_name(const OperatorInstance& op) -> std::string {
    switch (op.kind()) {
    case OpKind::Join: return op.text("left") + "_" + op.text("right") + "_join";
    case OpKind::Union: {
        std::string out;
        for (const auto& n : op.names("tables")) out += n + "_";
        return out + "union";
    }
    case OpKind::Pivot: return op.text("table") + "_pivot";
    case OpKind::Stack: return op.text("table") + "_stack";
    case OpKind::WideToLong: return op.text("table") + "_long";
    case OpKind::Transpose: return op.text("table") + "_transpose";
    case OpKind::ExeCode: return op.text("target");
    default: return op.text("table");
    }
}

} // namespace adp
