#pragma once

// Row-parallel evaluation kernels. Each kernel has an OpenMP version (adp::kernels) and a
// single-threaded reference (adp::kernels::serial) with identical results, including which row's
// error is reported: always the lowest failing row index.

#include <adp/error.hpp>
#include <adp/expr.hpp>
#include <adp/table.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adp::kernels {

/// A per-row failure; `row` is 0-based.
class RowFailure : public Error {
public:
    RowFailure(std::size_t row, const std::string& message)
        : Error("row " + std::to_string(row) + ": " + message), row_(row), cause_(message) {}

    [[nodiscard]] auto row() const -> std::size_t { return row_; }
    [[nodiscard]] auto cause() const -> const std::string& { return cause_; }

private:
    std::size_t row_;
    std::string cause_;
};

struct ExecPolicy {
    bool parallel = true;
    /// Below this row count the parallel kernels run serially.
    std::size_t min_parallel_rows = 2048;
};

/// Which columns an expression may reference and how nulls in a source column are treated.
struct EvalOptions {
    std::vector<std::size_t> visible;
    bool restrict_to_visible = false;
    /// When set, rows whose cell in this column is null yield null without evaluating.
    std::optional<std::size_t> pass_null_column;
};

namespace serial {

template <class F>
auto map_rows(std::size_t n, F&& fn) -> std::vector<Value> {
    std::vector<Value> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            out.push_back(fn(i));
        } catch (const std::exception& e) {
            throw RowFailure(i, e.what());
        }
    }
    return out;
}

auto evaluate_column(const Expr& e, const Table& t, const EvalOptions& opts = {}) -> std::vector<Value>;
/// true keeps the row; null and false drop it; anything else is a RowFailure.
auto filter_mask(const Expr& e, const Table& t) -> std::vector<char>;

} // namespace serial

template <class F>
auto map_rows(std::size_t n, F&& fn, const ExecPolicy& policy = {}) -> std::vector<Value> {
    if (!policy.parallel || n < policy.min_parallel_rows) {
        return serial::map_rows(n, std::forward<F>(fn));
    }
    std::vector<Value> out(n);
    std::size_t first_bad = n;
    std::string first_message;
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (const std::exception& e) {
#pragma omp critical(adp_kernel_error)
            {
                if (static_cast<std::size_t>(i) < first_bad) {
                    first_bad = static_cast<std::size_t>(i);
                    first_message = e.what();
                }
            }
        }
    }
    if (first_bad < n) {
        throw RowFailure(first_bad, first_message);
    }
    return out;
}

auto evaluate_column(const Expr& e, const Table& t, const EvalOptions& opts = {},
                     const ExecPolicy& policy = {}) -> std::vector<Value>;
auto filter_mask(const Expr& e, const Table& t, const ExecPolicy& policy = {}) -> std::vector<char>;

/// Worker threads available to the parallel kernels.
auto max_threads() -> int;

} // namespace adp::kernels
