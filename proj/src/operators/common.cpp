#include "common.hpp"

#include <algorithm>
#include <set>

namespace adp::ops {

auto require_table(const TableSet& state, const std::string& name) -> const Table& {
    auto t = state.find(name);
    if (!t) {
        throw OpFailure("table '" + name + "' does not exist", "missing table " + name);
    }
    return *t;
}

auto require_column(const Table& t, const std::string& column) -> std::size_t {
    auto idx = t.column_index(column);
    if (!idx) {
        throw OpFailure("column '" + column + "' not found in table '" + t.name() + "'",
                        "missing column " + column);
    }
    return *idx;
}

auto require_columns(const Table& t, const std::vector<std::string>& columns) -> std::vector<std::size_t> {
    std::vector<std::size_t> out;
    out.reserve(columns.size());
    for (const auto& c : columns) out.push_back(require_column(t, c));
    return out;
}

void require_absent(const Table& t, const std::string& column) {
    if (t.column_index(column)) {
        throw OpFailure("column '" + column + "' already exists in table '" + t.name() + "'",
                        "duplicate column " + column);
    }
}

void require_distinct(const std::vector<std::string>& names, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (!seen.insert(n).second) {
            throw OpFailure("duplicate name '" + n + "' in " + what, "duplicate column " + n);
        }
    }
}

auto build_table(std::string name, std::vector<std::string> columns, std::vector<Row> rows) -> Table {
    require_distinct(columns, "output columns");
    try {
        return Table::infer(std::move(name), std::move(columns), std::move(rows));
    } catch (const TypeError& e) {
        throw OpFailure(std::string("type error: ") + e.what(), "type error");
    }
}

auto with_rows(const Table& t, std::vector<Row> rows) -> Table { return Table(t.schema(), std::move(rows)); }

auto replace_column(const Table& t, std::size_t index, std::vector<Value> cells, Kind dtype) -> Table {
    Schema schema = t.schema();
    schema.columns[index].dtype = dtype;
    conform_column(cells, dtype);
    std::vector<Row> rows = t.rows();
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r][index] = std::move(cells[r]);
    return Table(std::move(schema), std::move(rows));
}

auto append_column(const Table& t, const std::string& name, std::vector<Value> cells) -> Table {
    require_absent(t, name);
    Kind dtype = Kind::Null;
    try {
        dtype = infer_column_kind(cells);
    } catch (const TypeError& e) {
        throw OpFailure("type error: column '" + name + "': " + e.what(), "type error");
    }
    conform_column(cells, dtype);
    Schema schema = t.schema();
    schema.columns.push_back({name, dtype, std::nullopt});
    std::vector<Row> rows = t.rows();
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r].push_back(std::move(cells[r]));
    return Table(std::move(schema), std::move(rows));
}

auto select_rows(const Table& t, const std::vector<char>& keep) -> Table {
    std::vector<Row> rows;
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        if (keep[r]) rows.push_back(t.rows()[r]);
    }
    return with_rows(t, std::move(rows));
}

auto aggregate(std::string_view fn, const std::vector<Value>& cells, Kind column_dtype, const std::string& column)
    -> Value {
    std::vector<Value> present;
    for (const auto& c : cells) {
        if (!c.is_null()) present.push_back(c);
    }
    auto require_numeric = [&] {
        if (column_dtype != Kind::Integer && column_dtype != Kind::Real && column_dtype != Kind::Null) {
            throw OpFailure(std::string(fn) + " needs a numeric column, '" + column + "' is " +
                                std::string(kind_name(column_dtype)),
                            "type error");
        }
    };
    if (fn == "sum") {
        require_numeric();
        if (column_dtype == Kind::Real) {
            double s = 0.0;
            for (const auto& v : present) s += v.as_number();
            try {
                return Value(s);
            } catch (const TypeError&) {
                throw OpFailure("sum overflow in column '" + column + "'", "overflow");
            }
        }
        std::int64_t s = 0;
        for (const auto& v : present) {
            if (__builtin_add_overflow(s, v.as_int(), &s)) {
                throw OpFailure("integer overflow summing column '" + column + "'", "overflow");
            }
        }
        return Value(s);
    }
    if (fn == "avg") {
        require_numeric();
        if (present.empty()) return {};
        double s = 0.0;
        for (const auto& v : present) s += v.as_number();
        return Value(s / static_cast<double>(present.size()));
    }
    if (fn == "min" || fn == "max") {
        if (present.empty()) return {};
        Value best = present.front();
        for (const auto& v : present) {
            if (fn == "min" ? compare(v, best) < 0 : compare(v, best) > 0) best = v;
        }
        return best;
    }
    if (fn == "count") return Value(static_cast<std::int64_t>(present.size()));
    if (fn == "count_distinct") {
        std::vector<Value> sorted = present;
        std::sort(sorted.begin(), sorted.end(), [](const Value& a, const Value& b) { return compare(a, b) < 0; });
        std::int64_t distinct = 0;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (i == 0 || compare(sorted[i - 1], sorted[i]) != 0) ++distinct;
        }
        return Value(distinct);
    }
    if (fn == "first") return present.empty() ? Value{} : present.front();
    if (fn == "last") return present.empty() ? Value{} : present.back();
    if (fn == "concat") {
        Value::List items;
        for (const auto& v : present) {
            if (v.kind() == Kind::List) {
                for (const auto& x : v.as_list()) items.push_back(x);
            } else {
                items.push_back(v);
            }
        }
        return Value(std::move(items));
    }
    throw OpFailure("unknown aggregation function '" + std::string(fn) + "'", "unknown aggregation " + std::string(fn));
}

} // namespace adp::ops
