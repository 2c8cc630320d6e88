#include <adp/reward.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace adp {

namespace {

auto name_set(const Table& t) -> std::set<std::string> {
    const auto names = t.column_names();
    return {names.begin(), names.end()};
}

auto project(const Table& t, const std::vector<std::string>& columns) -> Table {
    Schema schema;
    schema.table_name = t.name();
    std::vector<std::size_t> idx;
    for (const auto& c : columns) {
        idx.push_back(*t.column_index(c));
        schema.columns.push_back(t.schema().columns[idx.back()]);
    }
    std::vector<Row> rows;
    rows.reserve(t.row_count());
    for (const auto& r : t.rows()) {
        Row out;
        for (auto i : idx) out.push_back(r[i]);
        rows.push_back(std::move(out));
    }
    return Table(std::move(schema), std::move(rows));
}

} // namespace

auto outcome_reward(const Table& produced, const Table& target) -> int {
    return tables_equal(produced, target) ? 1 : 0;
}

auto schema_similarity(const Table& produced, const Table& target) -> double {
    const auto a = name_set(produced);
    const auto b = name_set(target);
    std::size_t common = 0;
    for (const auto& n : a) common += b.count(n);
    const auto all = a.size() + b.size() - common;
    if (all == 0) return 1.0;
    return static_cast<double>(common) / static_cast<double>(all);
}

auto shape_similarity(std::size_t produced_rows, std::size_t target_rows) -> double {
    if (target_rows == 0) return produced_rows == 0 ? 1.0 : 0.0;
    const double rel = (static_cast<double>(produced_rows) - static_cast<double>(target_rows)) /
                       static_cast<double>(target_rows);
    return std::exp(-std::abs(rel));
}

auto content_similarity(const Table& produced, const Table& target) -> double {
    const auto a = name_set(produced);
    const auto b = name_set(target);
    std::vector<std::string> matched;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(matched));
    if (matched.empty()) return 0.0;
    const auto n_hat = produced.row_count();
    const auto n_star = target.row_count();
    const auto longest = std::max(n_hat, n_star);
    if (longest == 0) return 1.0;
    const Table p = canonicalize(project(produced, matched));
    const Table t = canonicalize(project(target, matched));
    const auto shortest = std::min(n_hat, n_star);
    double total = 0.0;
    for (std::size_t c = 0; c < matched.size(); ++c) {
        std::size_t equal = 0;
        for (std::size_t i = 0; i < shortest; ++i) {
            if (compare(p.rows()[i][c], t.rows()[i][c]) == 0) ++equal;
        }
        total += static_cast<double>(equal) / static_cast<double>(longest);
    }
    return total / static_cast<double>(matched.size());
}

auto partial_reward(const Table& produced, const Table& target) -> PartialScores {
    PartialScores s;
    s.s_sch = schema_similarity(produced, target);
    s.s_shp = shape_similarity(produced.row_count(), target.row_count());
    s.s_cnt = content_similarity(produced, target);
    s.r_part = outcome_reward(produced, target) == 1 ? 1.0 : (s.s_sch + s.s_shp + s.s_cnt) / 3.0;
    return s;
}

auto hybrid_reward(int r_out, const PartialScores& partial, double r_llm, const RewardWeights& w)
    -> RewardBreakdown {
    RewardBreakdown b;
    b.r_out = r_out;
    b.s_sch = partial.s_sch;
    b.s_shp = partial.s_shp;
    b.s_cnt = partial.s_cnt;
    b.r_part = partial.r_part;
    b.r_llm = r_llm;
    b.total = w.alpha * r_out + w.beta * partial.r_part + w.gamma * r_llm;
    return b;
}

} // namespace adp
