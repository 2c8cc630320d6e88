#include "common.hpp"

#include <algorithm>
#include <numeric>

namespace adp::ops {

namespace {

auto sort_rows(const OperatorInstance& op, const Table& t) -> Table {
    const auto by = op.names("by");
    if (by.empty()) throw OpFailure("Sort needs at least one key column", "empty by");
    const auto keys = require_columns(t, by);
    std::vector<bool> ascending(by.size(), true);
    const auto& asc = op.arg("ascending").value;
    if (asc.kind() == Kind::Boolean) {
        std::fill(ascending.begin(), ascending.end(), asc.as_bool());
    } else {
        const auto& flags = asc.as_list();
        if (flags.size() != by.size()) {
            throw OpFailure("ascending has " + std::to_string(flags.size()) + " entries for " +
                                std::to_string(by.size()) + " sort keys",
                            "arity");
        }
        for (std::size_t i = 0; i < flags.size(); ++i) ascending[i] = flags[i].as_bool();
    }
    std::vector<std::size_t> order(t.row_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& rows = t.rows();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k < keys.size(); ++k) {
            const int c = compare(rows[a][keys[k]], rows[b][keys[k]]);
            if (c != 0) return ascending[k] ? c < 0 : c > 0;
        }
        return false;
    });
    std::vector<Row> out;
    out.reserve(order.size());
    for (auto i : order) out.push_back(rows[i]);
    return with_rows(t, std::move(out));
}

} // namespace

auto exec_row_selection(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx)
    -> std::vector<Table> {
    const auto& t = require_table(state, op.text("table"));
    switch (op.kind()) {
    case OpKind::Filter: {
        auto mask = guarded([&] { return kernels::filter_mask(op.expr("func"), t, ctx.policy); });
        return {select_rows(t, mask)};
    }
    case OpKind::Sort: return {sort_rows(op, t)};
    case OpKind::TopK: {
        const auto k = op.integer("k");
        if (k < 0) throw OpFailure("k must be non-negative, got " + std::to_string(k), "negative k");
        const auto n = std::min<std::size_t>(static_cast<std::size_t>(k), t.row_count());
        return {with_rows(t, std::vector<Row>(t.rows().begin(), t.rows().begin() + static_cast<std::ptrdiff_t>(n)))};
    }
    default: throw OpFailure("not a row selection operator", "dispatch");
    }
}

} // namespace adp::ops
