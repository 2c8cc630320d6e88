#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace adp::ops {

namespace {

auto subset_indices(const Table& t, const OperatorInstance& op) -> std::vector<std::size_t> {
    auto subset = op.optional_names("subset");
    if (!subset) {
        std::vector<std::size_t> all(t.column_count());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }
    if (subset->empty()) throw OpFailure("subset must not be empty", "empty subset");
    require_distinct(*subset, "subset");
    return require_columns(t, *subset);
}

auto drop_na(const OperatorInstance& op, const Table& t) -> Table {
    const auto cols = subset_indices(t, op);
    const bool any = op.text("how") == "any";
    std::vector<Row> rows;
    for (const auto& row : t.rows()) {
        const auto nulls = std::count_if(cols.begin(), cols.end(), [&](std::size_t c) { return row[c].is_null(); });
        const bool drop = any ? nulls > 0 : nulls == static_cast<std::ptrdiff_t>(cols.size());
        if (!drop) rows.push_back(row);
    }
    return with_rows(t, std::move(rows));
}

auto impute(const OperatorInstance& op, const Table& t) -> Table {
    const auto col = require_column(t, op.text("column"));
    const auto& mode = op.text("mode");
    const Kind dtype = t.schema().columns[col].dtype;
    std::vector<Value> present;
    for (const auto& row : t.rows()) {
        if (!row[col].is_null()) present.push_back(row[col]);
    }
    if ((mode == "mean" || mode == "median") && dtype != Kind::Integer && dtype != Kind::Real) {
        throw OpFailure(mode + " imputation needs a numeric column, '" + op.text("column") + "' is " +
                            std::string(kind_name(dtype)),
                        "type error");
    }
    if (present.empty()) {
        throw OpFailure("column '" + op.text("column") + "' has no non-null values to impute from",
                        "empty column " + op.text("column"));
    }
    Value fill;
    Kind out_dtype = dtype;
    if (mode == "mean") {
        double sum = 0.0;
        for (const auto& v : present) sum += v.as_number();
        fill = Value(sum / static_cast<double>(present.size()));
        out_dtype = Kind::Real;
    } else if (mode == "median") {
        std::sort(present.begin(), present.end(), [](const Value& a, const Value& b) { return compare(a, b) < 0; });
        fill = present[(present.size() - 1) / 2];
    } else {
        std::sort(present.begin(), present.end(), [](const Value& a, const Value& b) { return compare(a, b) < 0; });
        std::size_t best_count = 0;
        for (std::size_t i = 0; i < present.size();) {
            std::size_t j = i;
            while (j < present.size() && compare(present[j], present[i]) == 0) ++j;
            if (j - i > best_count) {
                best_count = j - i;
                fill = present[i];
            }
            i = j;
        }
    }
    std::vector<Value> cells = t.column_values(col);
    for (auto& c : cells) {
        if (c.is_null()) c = fill;
    }
    return replace_column(t, col, std::move(cells), out_dtype);
}

auto deduplicate(const OperatorInstance& op, const Table& t) -> Table {
    const auto cols = subset_indices(t, op);
    const bool keep_first = op.text("keep") == "first";
    auto key_less = [](const Row& a, const Row& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (const int c = compare(a[i], b[i]); c != 0) return c < 0;
        }
        return false;
    };
    std::map<Row, std::size_t, decltype(key_less)> chosen(key_less);
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        Row key;
        for (auto c : cols) key.push_back(t.rows()[r][c]);
        auto [it, inserted] = chosen.emplace(std::move(key), r);
        if (!inserted && !keep_first) it->second = r;
    }
    std::vector<char> keep(t.row_count(), 0);
    for (const auto& [_, r] : chosen) keep[r] = 1;
    return select_rows(t, keep);
}

auto error_detection(const OperatorInstance& op, const Table& t, const ExecContext& ctx) -> Table {
    const auto& column = op.text("column");
    require_column(t, column);
    auto flags = guarded([&] { return kernels::evaluate_column(op.expr("func"), t, {}, ctx.policy); });
    for (std::size_t r = 0; r < flags.size(); ++r) {
        if (!flags[r].is_null() && flags[r].kind() != Kind::Boolean) {
            throw OpFailure("row " + std::to_string(r) + ": validity function returned " +
                                std::string(kind_name(flags[r].kind())) + ", expected boolean",
                            "row " + std::to_string(r));
        }
    }
    return append_column(t, column + "_invalid", std::move(flags));
}

auto outlier_detection(const OperatorInstance& op, const Table& t) -> Table {
    const auto& column = op.text("column");
    const auto col = require_column(t, column);
    const Kind dtype = t.schema().columns[col].dtype;
    if (dtype != Kind::Integer && dtype != Kind::Real && dtype != Kind::Null) {
        throw OpFailure("outlier detection needs a numeric column, '" + column + "' is " +
                            std::string(kind_name(dtype)),
                        "type error");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : t.rows()) {
        if (!row[col].is_null()) {
            sum += row[col].as_number();
            ++n;
        }
    }
    std::vector<char> outlier(t.row_count(), 0);
    if (n > 0) {
        const double mean = sum / static_cast<double>(n);
        double sq = 0.0;
        for (const auto& row : t.rows()) {
            if (!row[col].is_null()) {
                const double d = row[col].as_number() - mean;
                sq += d * d;
            }
        }
        const double sd = std::sqrt(sq / static_cast<double>(n));
        for (std::size_t r = 0; r < t.row_count(); ++r) {
            const auto& v = t.rows()[r][col];
            if (!v.is_null() && std::fabs(v.as_number() - mean) > 3.0 * sd) outlier[r] = 1;
        }
    }
    if (op.text("action") == "remove") {
        std::vector<char> keep(outlier.size());
        for (std::size_t r = 0; r < keep.size(); ++r) keep[r] = outlier[r] ? 0 : 1;
        return select_rows(t, keep);
    }
    std::vector<Value> flags;
    flags.reserve(outlier.size());
    for (char o : outlier) flags.emplace_back(o != 0);
    return append_column(t, column + "_outlier", std::move(flags));
}

} // namespace

auto exec_cleaning(const OperatorInstance& op, const TableSet& state, const ExecContext& ctx) -> std::vector<Table> {
    const auto& t = require_table(state, op.text("table"));
    switch (op.kind()) {
    case OpKind::DropNA: return {drop_na(op, t)};
    case OpKind::MissingValueImputation: return {impute(op, t)};
    case OpKind::Deduplicate: return {deduplicate(op, t)};
    case OpKind::ErrorDetection: return {error_detection(op, t, ctx)};
    case OpKind::OutlierDetection: return {outlier_detection(op, t)};
    default: throw OpFailure("not a cleaning operator", "dispatch");
    }
}

} // namespace adp::ops
