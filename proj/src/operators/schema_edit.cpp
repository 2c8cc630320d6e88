#include "common.hpp"

#include <algorithm>
#include <set>

namespace adp::ops {

namespace {

auto keep_columns(const Table& t, const std::vector<char>& keep) -> Table {
    Schema schema{t.name(), t.schema().description, {}};
    for (std::size_t c = 0; c < t.column_count(); ++c) {
        if (keep[c]) schema.columns.push_back(t.schema().columns[c]);
    }
    std::vector<Row> rows;
    rows.reserve(t.row_count());
    for (const auto& row : t.rows()) {
        Row out;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (keep[c]) out.push_back(row[c]);
        }
        rows.push_back(std::move(out));
    }
    return Table(std::move(schema), std::move(rows));
}

auto rename_columns(const OperatorInstance& op, const Table& t) -> Table {
    const auto& mapping = op.map("rename_map");
    Schema schema = t.schema();
    std::set<std::string> keys;
    for (const auto& [from, to] : mapping) {
        if (!keys.insert(from).second) throw OpFailure("column '" + from + "' renamed twice", "duplicate column " + from);
        const auto idx = require_column(t, from);
        if (to.as_text().empty()) throw OpFailure("empty target name for column '" + from + "'", "empty name");
        schema.columns[idx].name = to.as_text();
    }
    std::set<std::string> seen;
    for (const auto& c : schema.columns) {
        if (!seen.insert(c.name).second) {
            throw OpFailure("rename produces duplicate column '" + c.name + "'", "duplicate column " + c.name);
        }
    }
    return Table(std::move(schema), t.rows());
}

auto drop_or_select(const OperatorInstance& op, const Table& t, bool select) -> Table {
    const auto columns = op.names("columns");
    require_distinct(columns, "columns");
    const auto idx = require_columns(t, columns);
    std::vector<char> keep(t.column_count(), select ? 0 : 1);
    for (auto i : idx) keep[i] = select ? 1 : 0;
    return keep_columns(t, keep);
}

auto split_column(const OperatorInstance& op, const Table& t, const ExecContext& ctx) -> Table {
    const auto& source = op.text("source");
    const auto src = require_column(t, source);
    const auto targets = op.names("target");
    if (targets.empty()) throw OpFailure("SplitColumn needs at least one target column", "empty target");
    require_distinct(targets, "target columns");
    for (const auto& name : targets) {
        if (name != source) require_absent(t, name);
    }
    auto parts = guarded([&] { return kernels::evaluate_column(op.expr("func"), t, {}, ctx.policy); });

    std::vector<std::string> names;
    for (std::size_t c = 0; c < t.column_count(); ++c) {
        if (c == src) {
            names.insert(names.end(), targets.begin(), targets.end());
        } else {
            names.push_back(t.schema().columns[c].name);
        }
    }
    std::vector<Row> rows;
    rows.reserve(t.row_count());
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        const auto& v = parts[r];
        if (!v.is_null() && v.kind() != Kind::List) {
            throw OpFailure("row " + std::to_string(r) + ": split function returned " +
                                std::string(kind_name(v.kind())) + ", expected list",
                            "row " + std::to_string(r));
        }
        const Value::List empty;
        const auto& items = v.is_null() ? empty : v.as_list();
        if (items.size() > targets.size()) {
            throw OpFailure("row " + std::to_string(r) + ": split produced " + std::to_string(items.size()) +
                                " parts for " + std::to_string(targets.size()) + " target columns",
                            "row " + std::to_string(r));
        }
        Row row;
        for (std::size_t c = 0; c < t.column_count(); ++c) {
            if (c == src) {
                for (std::size_t k = 0; k < targets.size(); ++k) {
                    row.push_back(k < items.size() ? items[k] : Value{});
                }
            } else {
                row.push_back(t.rows()[r][c]);
            }
        }
        rows.push_back(std::move(row));
    }
    return build_table(t.name(), std::move(names), std::move(rows));
}

auto concatenate(const OperatorInstance& op, const Table& t, const ExecContext& ctx) -> Table {
    const auto columns = op.names("columns");
    kernels::EvalOptions opts;
    opts.visible = require_columns(t, columns);
    opts.restrict_to_visible = true;
    const auto& target = op.text("target");
    require_absent(t, target);
    auto cells = guarded([&] { return kernels::evaluate_column(op.expr("func"), t, opts, ctx.policy); });
    return append_column(t, target, std::move(cells));
}

auto subtitle(const OperatorInstance& op, const Table& t) -> Table {
    const auto& target = op.text("target_col");
    require_absent(t, target);
    std::vector<Value> cells(t.row_count(), op.arg("title").value);
    return append_column(t, target, std::move(cells));
}

} // namespace

auto exec_schema_edit(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table> {
    const auto& t = require_table(state, op.text("table"));
    switch (op.kind()) {
    case OpKind::RenameColumn: return {rename_columns(op, t)};
    case OpKind::AddNewColumn: {
        const auto& name = op.text("name");
        require_absent(t, name);
        auto cells = guarded([&] { return kernels::evaluate_column(op.expr("func"), t, {}, ctx.policy); });
        return {append_column(t, name, std::move(cells))};
    }
    case OpKind::DropColumn: return {drop_or_select(op, t, false)};
    case OpKind::SplitColumn: return {split_column(op, t, ctx)};
    case OpKind::Concatenate: return {concatenate(op, t, ctx)};
    case OpKind::SelectColumn: return {drop_or_select(op, t, true)};
    case OpKind::Subtitle: return {subtitle(op, t)};
    default: throw OpFailure("not a schema editing operator", "dispatch");
    }
}

} // namespace adp::ops
