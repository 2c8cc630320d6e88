#include "common.hpp"

#include <map>

namespace adp::ops {

namespace {

auto row_less(const Row& a, const Row& b) -> bool {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (const int c = compare(a[i], b[i]); c != 0) return c < 0;
    }
    return false;
}

auto group_by(const OperatorInstance& op, const Table& t) -> Table {
    const auto by = op.names("by");
    if (by.empty()) throw OpFailure("GroupBy needs at least one key column", "empty by");
    require_distinct(by, "group keys");
    const auto keys = require_columns(t, by);
    const auto& agg = op.map("agg");
    const auto& choices = op.signature().params[2].choices;

    std::vector<std::string> names = by;
    std::vector<std::pair<std::size_t, std::string>> specs;
    for (const auto& [column, fn] : agg) {
        const auto idx = require_column(t, column);
        const auto& f = fn.as_text();
        if (std::find(choices.begin(), choices.end(), f) == choices.end()) {
            throw OpFailure("unknown aggregation function '" + f + "'", "unknown aggregation " + f);
        }
        specs.emplace_back(idx, f);
        names.push_back(column + "_" + f);
    }
    require_distinct(names, "GroupBy output");

    std::map<Row, std::size_t, decltype(&row_less)> group_of(&row_less);
    std::vector<Row> group_keys;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        Row key;
        for (auto k : keys) key.push_back(t.rows()[r][k]);
        auto [it, inserted] = group_of.emplace(key, group_keys.size());
        if (inserted) {
            group_keys.push_back(std::move(key));
            members.emplace_back();
        }
        members[it->second].push_back(r);
    }

    std::vector<Row> rows;
    for (std::size_t g = 0; g < group_keys.size(); ++g) {
        Row row = group_keys[g];
        for (const auto& [col, fn] : specs) {
            std::vector<Value> cells;
            for (auto r : members[g]) cells.push_back(t.rows()[r][col]);
            row.push_back(aggregate(fn, cells, t.schema().columns[col].dtype, t.schema().columns[col].name));
        }
        rows.push_back(std::move(row));
    }
    return build_table(t.name(), std::move(names), std::move(rows));
}

auto calculate_statistic(const OperatorInstance& op, const Table& t, const ExecContext& ctx) -> Table {
    const auto& stat = op.text("stat");
    auto cells = guarded([&] { return kernels::evaluate_column(op.expr("func"), t, {}, ctx.policy); });
    const Kind dtype = guarded([&] { return infer_column_kind(cells); });
    conform_column(cells, dtype);
    std::size_t present = 0;
    for (const auto& c : cells) present += c.is_null() ? 0 : 1;
    if (present == 0 && stat != "sum") {
        throw OpFailure(stat + " over an empty input", "empty input");
    }
    if ((stat == "sum" || stat == "avg") && dtype != Kind::Integer && dtype != Kind::Real && dtype != Kind::Null) {
        throw OpFailure(stat + " needs numeric values, function produced " + std::string(kind_name(dtype)),
                        "type error");
    }
    Value result = aggregate(stat, cells, dtype, stat);
    return build_table(t.name(), {stat}, {Row{std::move(result)}});
}

} // namespace

auto exec_aggregation(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table> {
    const auto& t = require_table(state, op.text("table"));
    switch (op.kind()) {
    case OpKind::GroupBy: return {group_by(op, t)};
    case OpKind::Count:
        return {build_table(t.name(), {"count"}, {Row{Value(static_cast<std::int64_t>(t.row_count()))}})};
    case OpKind::CalculateStatistic: return {calculate_statistic(op, t, ctx)};
    default: throw OpFailure("not an aggregation operator", "dispatch");
    }
}

} // namespace adp::ops
