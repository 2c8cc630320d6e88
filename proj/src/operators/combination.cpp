#include "common.hpp"

#include <algorithm>
#include <set>

namespace adp::ops {

namespace {

auto keys_match(const Row& a, const std::vector<std::size_t>& ka, const Row& b, const std::vector<std::size_t>& kb)
    -> bool {
    for (std::size_t i = 0; i < ka.size(); ++i) {
        if (a[ka[i]].is_null() || b[kb[i]].is_null() || compare(a[ka[i]], b[kb[i]]) != 0) return false;
    }
    return true;
}

auto join(const OperatorInstance& op, const TableSet& state) -> Table {
    const auto& left = require_table(state, op.text("left"));
    const auto& right = require_table(state, op.text("right"));
    const auto on = op.names("on");
    if (on.empty()) throw OpFailure("Join needs at least one key column", "empty on");
    require_distinct(on, "join keys");
    const auto lk = require_columns(left, on);
    const auto rk = require_columns(right, on);
    const auto& how = op.text("how");

    std::vector<std::size_t> lrest;
    std::vector<std::size_t> rrest;
    for (std::size_t c = 0; c < left.column_count(); ++c) {
        if (std::find(lk.begin(), lk.end(), c) == lk.end()) lrest.push_back(c);
    }
    for (std::size_t c = 0; c < right.column_count(); ++c) {
        if (std::find(rk.begin(), rk.end(), c) == rk.end()) rrest.push_back(c);
    }
    std::set<std::string> left_names;
    std::set<std::string> right_names;
    for (auto c : lrest) left_names.insert(left.schema().columns[c].name);
    for (auto c : rrest) right_names.insert(right.schema().columns[c].name);

    std::vector<std::string> names = on;
    for (auto c : lrest) {
        const auto& n = left.schema().columns[c].name;
        names.push_back(right_names.count(n) ? n + "_left" : n);
    }
    for (auto c : rrest) {
        const auto& n = right.schema().columns[c].name;
        names.push_back(left_names.count(n) ? n + "_right" : n);
    }

    auto emit = [&](const Row* l, const Row* r, std::vector<Row>& out) {
        Row row;
        for (std::size_t i = 0; i < on.size(); ++i) row.push_back(l ? (*l)[lk[i]] : (*r)[rk[i]]);
        for (auto c : lrest) row.push_back(l ? (*l)[c] : Value{});
        for (auto c : rrest) row.push_back(r ? (*r)[c] : Value{});
        out.push_back(std::move(row));
    };

    const bool keep_left = how == "left" || how == "outer";
    const bool keep_right = how == "right" || how == "outer";
    std::vector<Row> rows;
    std::vector<char> right_matched(right.row_count(), 0);
    for (const auto& l : left.rows()) {
        bool matched = false;
        for (std::size_t j = 0; j < right.row_count(); ++j) {
            if (keys_match(l, lk, right.rows()[j], rk)) {
                matched = true;
                right_matched[j] = 1;
                emit(&l, &right.rows()[j], rows);
            }
        }
        if (!matched && keep_left) emit(&l, nullptr, rows);
    }
    if (keep_right) {
        for (std::size_t j = 0; j < right.row_count(); ++j) {
            if (!right_matched[j]) emit(nullptr, &right.rows()[j], rows);
        }
    }
    return build_table(left.name() + "_" + right.name() + "_join", std::move(names), std::move(rows));
}

/// Rows of `t` reordered to `order` column names; throws when the name sets differ.
auto aligned_rows(const Table& t, const std::vector<std::string>& order, const std::string& first_name)
    -> std::vector<Row> {
    auto names = t.column_names();
    auto a = names;
    auto b = order;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
        throw OpFailure("table '" + t.name() + "' has columns incompatible with '" + first_name + "'",
                        "incompatible schemas");
    }
    const auto idx = require_columns(t, order);
    std::vector<Row> rows;
    for (const auto& row : t.rows()) {
        Row out;
        for (auto i : idx) out.push_back(row[i]);
        rows.push_back(std::move(out));
    }
    return rows;
}

auto union_tables(const OperatorInstance& op, const TableSet& state) -> Table {
    const auto names = op.names("tables");
    if (names.empty()) throw OpFailure("Union needs at least one table", "empty tables");
    const auto& first = require_table(state, names.front());
    const auto order = first.column_names();
    std::vector<Row> rows;
    std::string out_name;
    for (const auto& name : names) {
        const auto& t = require_table(state, name);
        for (auto& r : aligned_rows(t, order, first.name())) rows.push_back(std::move(r));
        out_name += name + "_";
    }
    out_name += "union";
    if (op.text("how") == "distinct") {
        auto less = [](const Row& a, const Row& b) {
            return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                                [](const Value& x, const Value& y) { return compare(x, y) < 0; });
        };
        std::set<Row, decltype(less)> seen(less);
        std::vector<Row> unique;
        for (auto& r : rows) {
            if (seen.insert(r).second) unique.push_back(std::move(r));
        }
        rows = std::move(unique);
    }
    return build_table(out_name, order, std::move(rows));
}

auto append(const OperatorInstance& op, const TableSet& state) -> Table {
    const auto& t = require_table(state, op.text("table"));
    const auto& other = require_table(state, op.text("other"));
    const auto order = t.column_names();
    std::vector<Row> rows = t.rows();
    for (auto& r : aligned_rows(other, order, t.name())) rows.push_back(std::move(r));
    Table out = build_table(t.name(), order, std::move(rows));
    Schema schema = out.schema();
    schema.description = t.schema().description;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        schema.columns[c].description = t.schema().columns[c].description;
    }
    return Table(std::move(schema), out.rows());
}

} // namespace

auto exec_combination(const OperatorInstance& op, const TableSet& state, const ExecContext&) -> std::vector<Table> {
    switch (op.kind()) {
    case OpKind::Join: return {join(op, state)};
    case OpKind::Union: return {union_tables(op, state)};
    case OpKind::Append: return {append(op, state)};
    default: throw OpFailure("not a combination operator", "dispatch");
    }
}

} // namespace adp::ops
