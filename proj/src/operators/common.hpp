#pragma once

#include <adp/error.hpp>
#include <adp/operators.hpp>

#include <string>
#include <vector>

namespace adp::ops {

/// Internal failure raised by operator implementations; converted to ExecError at the boundary.
class OpFailure : public Error {
public:
    OpFailure(const std::string& message, std::string detail)
        : Error(message), detail_(std::move(detail)) {}

    [[nodiscard]] auto detail() const -> const std::string& { return detail_; }

private:
    std::string detail_;
};

auto require_table(const TableSet& state, const std::string& name) -> const Table&;
auto require_column(const Table& t, const std::string& column) -> std::size_t;
auto require_columns(const Table& t, const std::vector<std::string>& columns) -> std::vector<std::size_t>;
void require_absent(const Table& t, const std::string& column);
void require_distinct(const std::vector<std::string>& names, const std::string& what);

/// Table::infer with type errors mapped to OpFailure.
auto build_table(std::string name, std::vector<std::string> columns, std::vector<Row> rows) -> Table;
/// Same schema, different rows (dtypes are kept).
auto with_rows(const Table& t, std::vector<Row> rows) -> Table;
auto replace_column(const Table& t, std::size_t index, std::vector<Value> cells, Kind dtype) -> Table;
auto append_column(const Table& t, const std::string& name, std::vector<Value> cells) -> Table;
auto select_rows(const Table& t, const std::vector<char>& keep) -> Table;

/// Runs `fn` and maps kernel/DSL/type failures to OpFailure.
template <class F>
auto guarded(F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const kernels::RowFailure& e) {
        throw OpFailure(e.what(), "row " + std::to_string(e.row()));
    } catch (const TypeError& e) {
        throw OpFailure(std::string("type error: ") + e.what(), "type error");
    }
}

/// Result of an aggregation function over a set of cells. Throws OpFailure on incompatible dtype.
auto aggregate(std::string_view fn, const std::vector<Value>& cells, Kind column_dtype,
               const std::string& column) -> Value;

auto exec_cleaning(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx) -> std::vector<Table>;
auto exec_normalization(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table>;
auto exec_schema_edit(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table>;
auto exec_row_selection(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table>;
auto exec_aggregation(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table>;
auto exec_combination(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table>;
auto exec_reshaping(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table>;
auto exec_program_synthesis(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table>;

} // namespace adp::ops
