// Serial vs OpenMP timings for the row kernels and the Filter/AddNewColumn operators that use them.

#include "support/gen.hpp"

#include <adp/kernels.hpp>
#include <adp/operators.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>

using namespace adp;

namespace {

auto best_of(int repeat, const std::function<void()>& fn) -> double {
    double best = 1e300;
    for (int i = 0; i < repeat; ++i) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void row(const std::string& what, std::size_t n, double serial_ms, double parallel_ms, bool same) {
    std::printf("%-44s %9zu %11.2f %11.2f %8.2fx  %s\n", what.c_str(), n, serial_ms, parallel_ms,
                serial_ms / std::max(parallel_ms, 1e-9), same ? "same" : "DIFFERENT");
}

} // namespace

auto main(int argc, char** argv) -> int {
    CLI::App app{"kernel benchmark: serial reference vs OpenMP"};
    std::vector<std::size_t> sizes{10'000, 100'000, 1'000'000};
    int repeat = 5;
    app.add_option("--rows", sizes, "table sizes");
    app.add_option("--repeat", repeat, "runs per measurement; the best is reported")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    std::printf("threads: %d\n", kernels::max_threads());
    std::printf("%-44s %9s %11s %11s %9s\n", "workload", "rows", "serial_ms", "parallel_ms", "speedup");
    const kernels::ExecPolicy serial_policy{false, 0};
    const kernels::ExecPolicy parallel_policy{true, 1};
    const std::vector<std::string> exprs{"col(\"a\") * 2 + col(\"r\")", "concat(lower(col(\"s\")), \"-\", col(\"a\"))",
                                         "if(col(\"r\") > 2.5, round(col(\"r\") * 10) / 10, -col(\"r\"))"};
    const std::string predicate = "col(\"a\") % 3 == 1 and col(\"r\") > 1";

    for (const auto n : sizes) {
        testing::Rng rng(7);
        const auto t = testing::random_table(rng, "t", {{"a", Kind::Integer}, {"s", Kind::Text}, {"r", Kind::Real}},
                                             n, 0.05);
        for (const auto& src : exprs) {
            const auto e = parse_expr(src);
            std::vector<Value> s;
            std::vector<Value> p;
            const auto ts = best_of(repeat, [&] { s = kernels::serial::evaluate_column(*e, t); });
            const auto tp = best_of(repeat, [&] { p = kernels::evaluate_column(*e, t, {}, parallel_policy); });
            row("evaluate " + src.substr(0, 35), n, ts, tp, s == p);
        }
        const auto pred = parse_expr(predicate);
        std::vector<char> ms;
        std::vector<char> mp;
        const auto ts = best_of(repeat, [&] { ms = kernels::serial::filter_mask(*pred, t); });
        const auto tp = best_of(repeat, [&] { mp = kernels::filter_mask(*pred, t, parallel_policy); });
        row("filter_mask", n, ts, tp, ms == mp);

        const TableSet state({t});
        for (const auto& call : {"Filter(\"t\", \"" + std::string("col(\\\"a\\\") % 3 == 1") + "\")",
                                 std::string("AddNewColumn(\"t\", \"z\", \"col(\\\"a\\\") * 2 + col(\\\"r\\\")\")")}) {
            const auto op = parse_operator_call(call);
            ExecContext sc;
            sc.policy = serial_policy;
            ExecContext pc;
            pc.policy = parallel_policy;
            std::optional<TableSet> os;
            std::optional<TableSet> op_out;
            const auto tso = best_of(repeat, [&] { os = execute_operator(op, state, sc).value(); });
            const auto tpo = best_of(repeat, [&] { op_out = execute_operator(op, state, pc).value(); });
            row("operator " + std::string(op.name()), n, tso, tpo, table_sets_equal(*os, *op_out));
        }
    }
    return 0;
}
