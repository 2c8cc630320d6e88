#include <adp/kernels.hpp>

namespace adp::kernels {

namespace {

auto row_evaluator(const Expr& e, const Table& t, const EvalOptions& opts) {
    return [&e, &t, &opts](std::size_t i) -> Value {
        const auto& row = t.rows()[i];
        if (opts.pass_null_column && row[*opts.pass_null_column].is_null()) {
            return {};
        }
        RowBinding binding(t.schema().columns, row, opts.visible, opts.restrict_to_visible);
        return eval_expr(e, binding);
    };
}

auto to_mask(const std::vector<Value>& values) -> std::vector<char> {
    std::vector<char> mask(values.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& v = values[i];
        if (v.is_null()) continue;
        if (v.kind() != Kind::Boolean) {
            throw RowFailure(i, "predicate returned " + std::string(kind_name(v.kind())) + ", expected boolean");
        }
        mask[i] = v.as_bool() ? 1 : 0;
    }
    return mask;
}

} // namespace

namespace serial {

auto evaluate_column(const Expr& e, const Table& t, const EvalOptions& opts) -> std::vector<Value> {
    return map_rows(t.row_count(), row_evaluator(e, t, opts));
}

auto filter_mask(const Expr& e, const Table& t) -> std::vector<char> {
    return to_mask(evaluate_column(e, t));
}

} // namespace serial

auto evaluate_column(const Expr& e, const Table& t, const EvalOptions& opts, const ExecPolicy& policy)
    -> std::vector<Value> {
    return map_rows(t.row_count(), row_evaluator(e, t, opts), policy);
}

auto filter_mask(const Expr& e, const Table& t, const ExecPolicy& policy) -> std::vector<char> {
    return to_mask(evaluate_column(e, t, {}, policy));
}

auto max_threads() -> int {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace adp::kernels
