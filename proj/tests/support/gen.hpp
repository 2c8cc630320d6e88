#pragma once

#include <adp/table.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace adp::testing {

using Rng = std::mt19937_64;

/// Uniform draw in [0, n).
auto pick(Rng& rng, std::size_t n) -> std::size_t;
auto chance(Rng& rng, double p) -> bool;

template <class T>
auto pick_from(Rng& rng, const std::vector<T>& items) -> const T& {
    return items[pick(rng, items.size())];
}

/// Small value domains so that ties, duplicates and joins actually happen.
auto random_scalar(Rng& rng, Kind kind, double null_p = 0.2) -> Value;
auto random_kind(Rng& rng) -> Kind;

using ColumnPlan = std::vector<std::pair<std::string, Kind>>;

/// Cells are drawn from the per-kind domains and the table goes through Table::infer, so the
/// dtype of a column whose cells all came out null is Null.
auto random_table(Rng& rng, const std::string& name, const ColumnPlan& columns, std::size_t rows,
                  double null_p = 0.2) -> Table;
/// 1..max_cols columns named a, b, c, d with random kinds; 0..max_rows rows.
auto random_table(Rng& rng, const std::string& name, std::size_t max_rows = 8, std::size_t max_cols = 4) -> Table;

/// Random row and column permutation of `t`.
auto permuted(Rng& rng, const Table& t) -> Table;
/// Copy with one cell replaced by a value that compares unequal; requires a non-empty table.
auto flip_one_cell(Rng& rng, const Table& t) -> Table;

/// movies (with a duplicate id 2), directors and ratings.
auto movies_sources() -> TableSet;
/// Deduplicate movies, join directors, keep title and name.
auto movies_pipeline_text() -> std::string;

} // namespace adp::testing
