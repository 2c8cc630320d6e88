#include "common.hpp"

#include <algorithm>
#include <map>

namespace adp::ops {

namespace {

auto row_less(const Row& a, const Row& b) -> bool {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (const int c = compare(a[i], b[i]); c != 0) return c < 0;
    }
    return false;
}

auto pivot(const OperatorInstance& op, const Table& t) -> Table {
    const auto index = op.names("index");
    require_distinct(index, "index");
    const auto idx = require_columns(t, index);
    const auto& columns_name = op.text("columns");
    const auto& values_name = op.text("values");
    const auto ccol = require_column(t, columns_name);
    const auto vcol = require_column(t, values_name);
    for (const auto& n : index) {
        if (n == columns_name || n == values_name) {
            throw OpFailure("index column '" + n + "' is also the columns/values column", "duplicate column " + n);
        }
    }
    const auto& aggfunc = op.text("aggfunc");

    std::vector<std::string> keys;
    std::map<std::string, std::size_t> key_pos;
    std::map<Row, std::size_t, decltype(&row_less)> group_of(&row_less);
    std::vector<Row> group_keys;
    // cells[group][key] -> matching value cells
    std::vector<std::vector<std::vector<Value>>> cells;
    std::vector<std::vector<char>> seen;
    for (const auto& row : t.rows()) {
        const auto key = render(row[ccol]);
        auto [kit, new_key] = key_pos.emplace(key, keys.size());
        if (new_key) {
            keys.push_back(key);
            for (auto& g : cells) g.emplace_back();
            for (auto& s : seen) s.push_back(0);
        }
        Row gk;
        for (auto i : idx) gk.push_back(row[i]);
        auto [git, new_group] = group_of.emplace(gk, group_keys.size());
        if (new_group) {
            group_keys.push_back(std::move(gk));
            cells.emplace_back(keys.size());
            seen.emplace_back(keys.size(), 0);
        }
        auto& bucket = cells[git->second][kit->second];
        if (aggfunc == "first_strict" && seen[git->second][kit->second]) {
            throw OpFailure("duplicate entry for index " + render(Value(group_keys[git->second])) + " and column '" +
                                key + "'",
                            "duplicate pivot entry");
        }
        seen[git->second][kit->second] = 1;
        bucket.push_back(row[vcol]);
    }

    std::vector<std::string> names = index;
    for (const auto& k : keys) names.push_back(k);
    const auto fn = aggfunc == "first_strict" ? std::string("first") : aggfunc;
    const Kind vtype = t.schema().columns[vcol].dtype;
    std::vector<Row> rows;
    for (std::size_t g = 0; g < group_keys.size(); ++g) {
        Row row = group_keys[g];
        for (std::size_t k = 0; k < keys.size(); ++k) {
            row.push_back(seen[g][k] ? aggregate(fn, cells[g][k], vtype, values_name) : Value{});
        }
        rows.push_back(std::move(row));
    }
    return build_table(t.name() + "_pivot", std::move(names), std::move(rows));
}

auto stack(const OperatorInstance& op, const Table& t) -> Table {
    const auto id_vars = op.names("id_vars");
    const auto value_vars = op.names("value_vars");
    if (value_vars.empty()) throw OpFailure("Stack needs at least one value column", "empty value_vars");
    std::vector<std::string> all = id_vars;
    all.insert(all.end(), value_vars.begin(), value_vars.end());
    require_distinct(all, "id_vars and value_vars");
    const auto ids = require_columns(t, id_vars);
    const auto vals = require_columns(t, value_vars);
    std::vector<std::string> names = id_vars;
    names.emplace_back("variable");
    names.emplace_back("value");
    std::vector<Row> rows;
    for (const auto& row : t.rows()) {
        for (std::size_t v = 0; v < vals.size(); ++v) {
            Row out;
            for (auto i : ids) out.push_back(row[i]);
            out.emplace_back(value_vars[v]);
            out.push_back(row[vals[v]]);
            rows.push_back(std::move(out));
        }
    }
    return build_table(t.name() + "_stack", std::move(names), std::move(rows));
}

auto wide_to_long(const OperatorInstance& op, const Table& t) -> Table {
    const auto stubs = op.names("stubnames");
    const auto id_cols = op.names("i");
    const auto& j = op.text("j");
    if (stubs.empty()) throw OpFailure("WideToLong needs at least one stub name", "empty stubnames");
    require_distinct(id_cols, "i");
    const auto ids = require_columns(t, id_cols);

    // (stub, suffix) -> column index
    std::map<std::pair<std::size_t, std::string>, std::size_t> cell_of;
    std::vector<std::string> suffixes;
    for (std::size_t c = 0; c < t.column_count(); ++c) {
        if (std::find(ids.begin(), ids.end(), c) != ids.end()) continue;
        const auto& name = t.schema().columns[c].name;
        std::optional<std::size_t> best;
        for (std::size_t s = 0; s < stubs.size(); ++s) {
            if (name.size() > stubs[s].size() && name.compare(0, stubs[s].size(), stubs[s]) == 0 &&
                (!best || stubs[s].size() > stubs[*best].size())) {
                best = s;
            }
        }
        if (!best) continue;
        std::string suffix = name.substr(stubs[*best].size());
        if (suffix.front() == '_') suffix.erase(0, 1);
        if (suffix.empty()) continue;
        if (!cell_of.emplace(std::make_pair(*best, suffix), c).second) {
            throw OpFailure("columns for stub '" + stubs[*best] + "' and suffix '" + suffix + "' are ambiguous",
                            "duplicate column " + name);
        }
        if (std::find(suffixes.begin(), suffixes.end(), suffix) == suffixes.end()) suffixes.push_back(suffix);
    }
    for (std::size_t s = 0; s < stubs.size(); ++s) {
        const bool any = std::any_of(cell_of.begin(), cell_of.end(), [&](const auto& e) { return e.first.first == s; });
        if (!any) throw OpFailure("no columns match stub '" + stubs[s] + "'", "missing column " + stubs[s]);
    }

    std::vector<std::string> names = id_cols;
    names.push_back(j);
    names.insert(names.end(), stubs.begin(), stubs.end());
    std::vector<Row> rows;
    for (const auto& row : t.rows()) {
        for (const auto& suffix : suffixes) {
            Row out;
            for (auto i : ids) out.push_back(row[i]);
            out.emplace_back(suffix);
            for (std::size_t s = 0; s < stubs.size(); ++s) {
                auto it = cell_of.find({s, suffix});
                out.push_back(it == cell_of.end() ? Value{} : row[it->second]);
            }
            rows.push_back(std::move(out));
        }
    }
    return build_table(t.name() + "_long", std::move(names), std::move(rows));
}

auto transpose(const Table& t) -> Table {
    std::vector<std::string> names{"column"};
    for (std::size_t r = 0; r < t.row_count(); ++r) names.push_back("r" + std::to_string(r));
    std::vector<Row> rows;
    for (std::size_t c = 0; c < t.column_count(); ++c) {
        Row out{Value(t.schema().columns[c].name)};
        for (const auto& row : t.rows()) {
            out.push_back(row[c].is_null() ? Value{} : Value(render(row[c])));
        }
        rows.push_back(std::move(out));
    }
    return build_table(t.name() + "_transpose", std::move(names), std::move(rows));
}

auto explode(const OperatorInstance& op, const Table& t) -> Table {
    const auto col = require_column(t, op.text("column"));
    std::vector<Row> rows;
    for (const auto& row : t.rows()) {
        const auto& cell = row[col];
        if (cell.kind() != Kind::List) {
            rows.push_back(row);
            continue;
        }
        if (cell.as_list().empty()) {
            Row out = row;
            out[col] = Value{};
            rows.push_back(std::move(out));
            continue;
        }
        for (const auto& item : cell.as_list()) {
            Row out = row;
            out[col] = item;
            rows.push_back(std::move(out));
        }
    }
    Table out = build_table(t.name(), t.column_names(), std::move(rows));
    Schema schema = out.schema();
    schema.description = t.schema().description;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        schema.columns[c].description = t.schema().columns[c].description;
        if (c != col && schema.columns[c].dtype == Kind::Null) schema.columns[c].dtype = t.schema().columns[c].dtype;
    }
    return Table(std::move(schema), out.rows());
}

} // namespace

auto exec_reshaping(const OperatorInstance& op, const TableSet& state, const ExecContext&) -> std::vector<Table> {
    const auto& t = require_table(state, op.text("table"));
    switch (op.kind()) {
    case OpKind::Pivot: return {pivot(op, t)};
    case OpKind::Stack: return {stack(op, t)};
    case OpKind::WideToLong: return {wide_to_long(op, t)};
    case OpKind::Transpose: return {transpose(t)};
    case OpKind::Explode: return {explode(op, t)};
    default: throw OpFailure("not a reshaping operator", "dispatch");
    }
}

} // namespace adp::ops
