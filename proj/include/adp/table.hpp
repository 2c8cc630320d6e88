#pragma once

#include <adp/value.hpp>

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adp {

struct ColumnSpec {
    std::string name;
    /// Kind::Null marks a column whose cells are all null and whose type is still unknown.
    Kind dtype = Kind::Null;
    std::optional<std::string> description;
};

struct Schema {
    std::string table_name;
    std::optional<std::string> description;
    std::vector<ColumnSpec> columns;

    [[nodiscard]] auto column_index(std::string_view name) const -> std::optional<std::size_t>;
    [[nodiscard]] auto column_names() const -> std::vector<std::string>;
};

using Row = std::vector<Value>;

/// Immutable table. The constructor enforces the schema invariants and throws TypeError.
class Table {
public:
    Table() = default;
    Table(Schema schema, std::vector<Row> rows);

    /// Builds a table from raw rows, inferring each column dtype. Integer cells in a column that
    /// also holds reals are widened; any other kind mix throws TypeError.
    static auto infer(std::string name, std::vector<std::string> columns, std::vector<Row> rows)
        -> Table;

    [[nodiscard]] auto schema() const -> const Schema& { return schema_; }
    [[nodiscard]] auto name() const -> const std::string& { return schema_.table_name; }
    [[nodiscard]] auto rows() const -> const std::vector<Row>& { return rows_; }
    [[nodiscard]] auto row_count() const -> std::size_t { return rows_.size(); }
    [[nodiscard]] auto column_count() const -> std::size_t { return schema_.columns.size(); }
    [[nodiscard]] auto column_names() const -> std::vector<std::string> {
        return schema_.column_names();
    }
    [[nodiscard]] auto column_index(std::string_view name) const -> std::optional<std::size_t> {
        return schema_.column_index(name);
    }
    [[nodiscard]] auto column_values(std::size_t index) const -> std::vector<Value>;

    [[nodiscard]] auto renamed(std::string name) const -> Table;

private:
    Schema schema_;
    std::vector<Row> rows_;
};

/// Common dtype for a column of cells (Integer+Real -> Real); throws TypeError on other mixes.
auto infer_column_kind(std::span<const Value> cells) -> Kind;
/// Widens Integer cells to Real when `dtype` is Real.
void conform_column(std::vector<Value>& cells, Kind dtype);

/// Columns sorted by name, rows sorted by the total cell order. Idempotent.
auto canonicalize(const Table& t) -> Table;
/// Equality invariant to row and column order; cells compared exactly (2 == 2.0), names ignored.
auto tables_equal(const Table& a, const Table& b) -> bool;

/// Markdown rendering: header, dtype row, up to `sample_rows` rows, then "rows: N".
auto serialize_table(const Table& t, std::size_t sample_rows) -> std::string;

/// Environment state: tables keyed by name. Tables are shared, so untouched tables keep their
/// identity across states.
class TableSet {
public:
    TableSet() = default;
    explicit TableSet(std::vector<Table> tables);

    [[nodiscard]] auto contains(std::string_view name) const -> bool;
    /// Null when absent.
    [[nodiscard]] auto find(std::string_view name) const -> std::shared_ptr<const Table>;
    [[nodiscard]] auto names() const -> std::vector<std::string>;
    [[nodiscard]] auto size() const -> std::size_t { return tables_.size(); }
    [[nodiscard]] auto empty() const -> bool { return tables_.empty(); }

    /// Returns a copy with `table` inserted or replaced under its own name.
    [[nodiscard]] auto with(Table table) const -> TableSet;
    void put(Table table);

    [[nodiscard]] auto begin() const { return tables_.begin(); }
    [[nodiscard]] auto end() const { return tables_.end(); }

private:
    std::map<std::string, std::shared_ptr<const Table>, std::less<>> tables_;
};

/// Same names, and tables_equal for each name.
auto table_sets_equal(const TableSet& a, const TableSet& b) -> bool;

} // namespace adp
