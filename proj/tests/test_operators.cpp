#include <doctest.h>

#include "support/gen.hpp"

#include <adp/error.hpp>
#include <adp/operators.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

using namespace adp;

namespace {

auto run(const std::string& call, const TableSet& state, const ExecContext& ctx = {}) -> ExecResult {
    return execute_operator(parse_operator_call(call), state, ctx);
}

auto one(const Table& t) -> TableSet { return TableSet({t}); }

auto out(const ExecResult& r, const std::string& name) -> Table {
    REQUIRE_MESSAGE(r.has_value(), (r.has_value() ? "" : describe(r.error())));
    auto t = r.value().find(name);
    REQUIRE(t);
    return *t;
}

auto column(const Table& t, const std::string& name) -> std::vector<Value> {
    auto idx = t.column_index(name);
    REQUIRE(idx);
    return t.column_values(*idx);
}

auto have_sh() -> bool { return std::filesystem::exists("/bin/sh"); }

} // namespace

TEST_CASE("registry holds the thirty enumerated operators") {
    CHECK(operator_registry().size() == 30);
    for (const auto& sig : operator_registry()) {
        CHECK(find_operator(sig.name) == sig.kind);
        CHECK(signature_of(sig.kind).name == sig.name);
    }
    CHECK_FALSE(find_operator("Frobnicate"));
    CHECK(describe_signature(signature_of(OpKind::Deduplicate)) == "Deduplicate(table, subset, keep)");
}

TEST_CASE("parse_operator_call examples") {
    auto d = parse_operator_call("Deduplicate(\"movies\", [\"id\"], \"first\")");
    CHECK(d.kind() == OpKind::Deduplicate);
    CHECK(d.text("table") == "movies");
    CHECK(d.names("subset") == std::vector<std::string>{"id"});
    CHECK(d.text("keep") == "first");
    CHECK_THROWS_AS(parse_operator_call("Deduplicate(\"movies\")"), ParseError);

    auto f = parse_operator_call("Filter(\"t\", \"col(\\\"v\\\") > 3\")");
    CHECK(f.kind() == OpKind::Filter);
    CHECK(f.expr("func").op == ExprOp::Gt);

    CHECK_THROWS_AS(parse_operator_call("Nope(\"t\")"), ParseError);
    CHECK_THROWS_AS(parse_operator_call("Filter(\"t\", \"col(\")"), ParseError);
    CHECK_THROWS_AS(parse_operator_call("DropNA(\"t\", null, \"sometimes\")"), ParseError);
    CHECK_THROWS_AS(parse_operator_call("TopK(\"t\", \"x\")"), ParseError);
    // bare identifiers are accepted as text and whitespace is irrelevant
    CHECK(parse_operator_call("Deduplicate( movies ,[ id ], first )") == d);
    auto r = parse_operator_call("RenameColumn(\"t\", {\"a\": \"b\", c: \"d\"})");
    CHECK(r.map("rename_map").size() == 2);
}

TEST_CASE("print and parse round trip across the registry") {
    const std::vector<std::string> calls{
        "DropNA(\"t\", null, \"all\")",
        "MissingValueImputation(\"t\", \"a\", \"median\")",
        "ErrorDetection(\"t\", \"a\", \"col(\\\"a\\\") < 0\")",
        "OutlierDetection(\"t\", \"a\", \"flag\")",
        "ValueTransform(\"t\", \"a\", \"lower(col(\\\"a\\\"))\")",
        "StandardizeDatetime(\"t\", \"d\", \"%Y-%m-%d\")",
        "CastType(\"t\", \"a\", \"int\")",
        "RenameColumn(\"t\", {\"a\": \"b\"})",
        "AddNewColumn(\"t\", \"z\", \"col(\\\"a\\\") * 2\")",
        "SplitColumn(\"t\", \"full\", [\"first\", \"last\"], \"split(col(\\\"full\\\"), \\\" \\\")\")",
        "Subtitle(\"t\", \"Q1 \\\"report\\\"\", \"title\")",
        "Sort(\"t\", [\"a\", \"b\"], [true, false])",
        "TopK(\"t\", 3)",
        "GroupBy(\"t\", [\"g\"], {\"v\": \"sum\", \"w\": \"concat\"})",
        "CalculateStatistic(\"t\", \"avg\", \"col(\\\"v\\\")\")",
        "Join(\"a\", \"b\", [\"k\"], \"outer\")",
        "Union([\"a\", \"b\", \"c\"], \"distinct\")",
        "Pivot(\"t\", [\"id\"], \"k\", \"v\", \"first_strict\")",
        "WideToLong(\"t\", [\"x\", \"y\"], [\"id\"], \"year\")",
        "ExeCode([\"a\"], \"out\", \"cat\")",
    };
    for (const auto& c : calls) {
        INFO(c);
        auto op = parse_operator_call(c);
        auto printed = print_operator_call(op);
        CHECK(parse_operator_call(printed) == op);
        CHECK(print_operator_call(parse_operator_call(printed)) == printed);
    }
}

TEST_CASE("execute_operator general contract") {
    auto t = Table::infer("t", {"id", "v"}, {{1, 10}, {2, 20}});
    auto other = Table::infer("u", {"x"}, {{1}});
    TableSet state({t, other});

    auto same = run("Deduplicate(\"t\", [\"id\"], \"first\")", state);
    CHECK(tables_equal(out(same, "t"), t));

    auto bad = run("Filter(\"t\", \"col(\\\"x\\\") > 1\")", state);
    REQUIRE_FALSE(bad.has_value());
    CHECK(bad.error().detail == "missing column x");
    CHECK_FALSE(bad.error().message.empty());

    auto missing = run("Count(\"nope\")", state);
    REQUIRE_FALSE(missing.has_value());

    auto ok = run("Filter(\"t\", \"col(\\\"v\\\") > 10\")", state);
    REQUIRE(ok.has_value());
    CHECK(ok.value().find("u").get() == state.find("u").get());
    CHECK(state.find("t")->row_count() == 2);
}

TEST_CASE("movies join keeps ratings and directors untouched") {
    auto s = testing::movies_sources();
    auto r = run("Join(\"movies\", \"directors\", [\"director_id\"], \"inner\")", s);
    auto j = out(r, "movies_directors_join");
    CHECK(j.row_count() == 4);
    CHECK(j.column_names() == std::vector<std::string>{"director_id", "id", "title", "year", "name"});
    CHECK(r.value().find("ratings").get() == s.find("ratings").get());
    CHECK(r.value().find("directors").get() == s.find("directors").get());
    CHECK(r.value().find("movies").get() == s.find("movies").get());
}

TEST_CASE("cleaning examples") {
    auto t = Table::infer("t", {"a", "b"}, {{1, Value{}}, {Value{}, 2}, {3, 4}});
    auto d = out(run("DropNA(\"t\", [\"a\"], \"any\")", one(t)), "t");
    CHECK(d.rows() == std::vector<Row>{{1, Value{}}, {3, 4}});
    auto all = out(run("DropNA(\"t\", null, \"all\")", one(t)), "t");
    CHECK(all.row_count() == 3);

    auto m = Table::infer("t", {"x"}, {{1.0}, {Value{}}, {3.0}});
    CHECK(column(out(run("MissingValueImputation(\"t\", \"x\", \"mean\")", one(m)), "t"), "x") ==
          std::vector<Value>{1.0, 2.0, 3.0});
    auto med = Table::infer("t", {"x"}, {{4}, {1}, {Value{}}, {3}, {2}});
    CHECK(column(out(run("MissingValueImputation(\"t\", \"x\", \"median\")", one(med)), "t"), "x")[2] == Value(2));
    auto mode = Table::infer("t", {"s"}, {{"b"}, {"a"}, {Value{}}, {"b"}, {"a"}});
    CHECK(column(out(run("MissingValueImputation(\"t\", \"s\", \"mode\")", one(mode)), "t"), "s")[2] == Value("a"));
    CHECK_FALSE(run("MissingValueImputation(\"t\", \"s\", \"mean\")", one(mode)).has_value());

    auto dup = Table::infer("t", {"k", "v"}, {{1, "a"}, {2, "b"}, {1, "c"}});
    CHECK(out(run("Deduplicate(\"t\", [\"k\"], \"last\")", one(dup)), "t").rows() ==
          std::vector<Row>{{2, "b"}, {1, "c"}});

    auto e = out(run("ErrorDetection(\"t\", \"k\", \"col(\\\"k\\\") > 1\")", one(dup)), "t");
    CHECK(column(e, "k_invalid") == std::vector<Value>{false, true, false});
}

TEST_CASE("outlier detection uses three population standard deviations") {
    auto flat = Table::infer("t", {"x"}, {{5}, {5}, {5}});
    CHECK(tables_equal(out(run("OutlierDetection(\"t\", \"x\", \"remove\")", one(flat)), "t"), flat));
    CHECK(column(out(run("OutlierDetection(\"t\", \"x\", \"flag\")", one(flat)), "t"), "x_outlier") ==
          std::vector<Value>{false, false, false});

    // twenty zeros and one 100: mean 100/21, population sd 100*sqrt(20)/21, z = sqrt(20) > 3
    std::vector<Row> rows(20, Row{0});
    rows.push_back({100});
    auto spiky = Table::infer("t", {"x"}, rows);
    auto kept = out(run("OutlierDetection(\"t\", \"x\", \"remove\")", one(spiky)), "t");
    CHECK(kept.row_count() == 20);
    auto flagged = column(out(run("OutlierDetection(\"t\", \"x\", \"flag\")", one(spiky)), "t"), "x_outlier");
    CHECK(flagged.back() == Value(true));
    CHECK(std::count(flagged.begin(), flagged.end(), Value(true)) == 1);

    auto text = Table::infer("t", {"s"}, {{"a"}});
    CHECK_FALSE(run("OutlierDetection(\"t\", \"s\", \"flag\")", one(text)).has_value());
}

TEST_CASE("normalization examples") {
    auto c = Table::infer("t", {"c"}, {{"x"}, {Value{}}});
    CHECK(tables_equal(out(run("ValueTransform(\"t\", \"c\", \"col(\\\"c\\\")\")", one(c)), "t"), c));

    auto d = Table::infer("t", {"d"}, {{"2023/01/05"}, {"January 7, 2023"}, {Value{}}});
    auto sd = out(run("StandardizeDatetime(\"t\", \"d\", \"%Y-%m-%d\")", one(d)), "t");
    CHECK(column(sd, "d") == std::vector<Value>{"2023-01-05", "2023-01-07", Value{}});
    auto junk = Table::infer("t", {"d"}, {{"2023/01/05"}, {"soon"}});
    auto jr = run("StandardizeDatetime(\"t\", \"d\", \"%Y-%m-%d\")", one(junk));
    REQUIRE_FALSE(jr.has_value());
    CHECK(describe(jr.error()).find("soon") != std::string::npos);

    auto s = Table::infer("t", {"s"}, {{"1"}, {"2"}, {"x"}});
    auto cr = run("CastType(\"t\", \"s\", \"int\")", one(s));
    REQUIRE_FALSE(cr.has_value());
    CHECK(describe(cr.error()).find("row 2") != std::string::npos);
    auto good = Table::infer("t", {"s"}, {{"1"}, {"+2"}, {Value{}}});
    auto cast = out(run("CastType(\"t\", \"s\", \"int\")", one(good)), "t");
    CHECK(cast.schema().columns[0].dtype == Kind::Integer);
    CHECK(column(cast, "s") == std::vector<Value>{1, 2, Value{}});
}

TEST_CASE("schema editing examples") {
    auto t = Table::infer("t", {"a", "b"}, {{1, 2}});
    CHECK(tables_equal(out(run("SelectColumn(\"t\", [\"a\", \"b\"])", one(t)), "t"), t));
    CHECK(out(run("SelectColumn(\"t\", [\"b\", \"a\"])", one(t)), "t").column_names() ==
          std::vector<std::string>{"a", "b"});
    CHECK_FALSE(run("RenameColumn(\"t\", {\"a\": \"b\"})", one(t)).has_value());
    CHECK(out(run("RenameColumn(\"t\", {\"a\": \"b\", \"b\": \"a\"})", one(t)), "t").column_names() ==
          std::vector<std::string>{"b", "a"});

    auto p = Table::infer("people", {"full"}, {{"Ada Lovelace"}, {"Plato"}});
    auto sp = out(run("SplitColumn(\"people\", \"full\", [\"first\", \"last\"], \"split(col(\\\"full\\\"), \\\" \\\")\")",
                      one(p)),
                  "people");
    CHECK(sp.column_names() == std::vector<std::string>{"first", "last"});
    CHECK(sp.rows() == std::vector<Row>{{"Ada", "Lovelace"}, {"Plato", Value{}}});
    CHECK_FALSE(run("SplitColumn(\"people\", \"full\", [\"x\"], \"col(\\\"full\\\")\")", one(p)).has_value());

    auto cc = out(run("Concatenate(\"t\", [\"a\", \"b\"], \"ab\", \"concat(col(\\\"a\\\"), \\\"-\\\", col(\\\"b\\\"))\")",
                      one(t)),
                  "t");
    CHECK(cc.rows()[0] == Row{1, 2, "1-2"});
    auto sub = out(run("Subtitle(\"t\", \"Q1\", \"title\")", one(t)), "t");
    CHECK(column(sub, "title") == std::vector<Value>{"Q1"});
    auto add = out(run("AddNewColumn(\"t\", \"c\", \"col(\\\"a\\\") + col(\\\"b\\\")\")", one(t)), "t");
    CHECK(column(add, "c") == std::vector<Value>{3});
    CHECK(out(run("DropColumn(\"t\", [\"a\"])", one(t)), "t").column_names() == std::vector<std::string>{"b"});
}

TEST_CASE("row selection examples") {
    auto t = Table::infer("t", {"a"}, {{3}, {1}, {2}});
    CHECK(tables_equal(out(run("Filter(\"t\", \"true\")", one(t)), "t"), t));
    CHECK(column(out(run("Sort(\"t\", [\"a\"], true)", one(t)), "t"), "a") == std::vector<Value>{1, 2, 3});
    CHECK(column(out(run("Sort(\"t\", [\"a\"], false)", one(t)), "t"), "a") == std::vector<Value>{3, 2, 1});
    CHECK(out(run("TopK(\"t\", 10)", one(t)), "t").row_count() == 3);
    CHECK(column(out(run("TopK(\"t\", 2)", one(t)), "t"), "a") == std::vector<Value>{3, 1});
    CHECK_FALSE(run("TopK(\"t\", -1)", one(t)).has_value());
    CHECK_FALSE(run("Filter(\"t\", \"col(\\\"a\\\") + 1\")", one(t)).has_value());

    auto n = Table::infer("t", {"a", "b"}, {{Value{}, 1}, {2, 2}, {Value{}, 3}, {1, 4}});
    CHECK(column(out(run("Sort(\"t\", [\"a\"], true)", one(n)), "t"), "b") == std::vector<Value>{1, 3, 4, 2});
}

TEST_CASE("aggregation examples") {
    auto t = Table::infer("t", {"g", "v"}, {{"a", 1}, {"a", 2}, {"b", 3}});
    auto g = out(run("GroupBy(\"t\", [\"g\"], {\"v\": \"sum\"})", one(t)), "t");
    CHECK(g.column_names() == std::vector<std::string>{"g", "v_sum"});
    CHECK(g.rows() == std::vector<Row>{{"a", 3}, {"b", 3}});
    auto c = out(run("Count(\"t\")", one(t)), "t");
    CHECK(c.column_names() == std::vector<std::string>{"count"});
    CHECK(c.rows() == std::vector<Row>{{3}});
    auto v = Table::infer("t", {"v"}, {{1}, {5}, {3}});
    auto s = out(run("CalculateStatistic(\"t\", \"max\", \"col(\\\"v\\\") * 2\")", one(v)), "t");
    CHECK(s.column_names() == std::vector<std::string>{"max"});
    CHECK(s.rows() == std::vector<Row>{{10}});
    auto empty = Table::infer("t", {"v"}, {});
    CHECK_FALSE(run("CalculateStatistic(\"t\", \"avg\", \"col(\\\"v\\\")\")", one(empty)).has_value());
    CHECK_FALSE(run("GroupBy(\"t\", [\"v\"], {\"g\": \"avg\"})", one(t)).has_value());
}

TEST_CASE("combination examples") {
    auto l = Table::infer("l", {"k", "x"}, {{1, "p"}, {2, "q"}});
    auto r = Table::infer("r", {"k", "x"}, {{2, "s"}, {3, "t"}});
    TableSet lr({l, r});
    auto j = out(run("Join(\"l\", \"r\", [\"k\"], \"inner\")", lr), "l_r_join");
    CHECK(j.column_names() == std::vector<std::string>{"k", "x_left", "x_right"});
    CHECK(j.rows() == std::vector<Row>{{2, "q", "s"}});
    CHECK(out(run("Join(\"l\", \"r\", [\"k\"], \"outer\")", lr), "l_r_join").row_count() == 3);
    CHECK(out(run("Join(\"l\", \"r\", [\"k\"], \"left\")", lr), "l_r_join").row_count() == 2);

    auto t = Table::infer("t", {"a", "b"}, {{1, 2}, {3, 4}});
    auto u = out(run("Union([\"t\", \"t\"], \"distinct\")", one(t)), "t_t_union");
    CHECK(tables_equal(u, t));
    CHECK(out(run("Union([\"t\", \"t\"], \"all\")", one(t)), "t_t_union").row_count() == 4);

    auto e = Table::infer("e", {"b", "a"}, {});
    auto a = out(run("Append(\"t\", \"e\")", TableSet({t, e})), "t");
    CHECK(tables_equal(a, t));
    auto wrong = Table::infer("w", {"a"}, {{1}});
    CHECK_FALSE(run("Append(\"t\", \"w\")", TableSet({t, wrong})).has_value());
}

TEST_CASE("reshaping examples") {
    auto lst = Table::infer("t", {"id", "tags"},
                            {{1, Value(Value::List{Value("a"), Value("b")})}, {2, Value(Value::List{})}});
    auto ex = out(run("Explode(\"t\", \"tags\")", one(lst)), "t");
    CHECK(ex.rows() == std::vector<Row>{{1, "a"}, {1, "b"}, {2, Value{}}});
    CHECK_FALSE(run("Explode(\"t\", \"nope\")", one(lst)).has_value());

    auto lng = Table::infer("t", {"id", "k", "v"}, {{1, "x", 10}, {1, "y", 20}});
    auto pv = out(run("Pivot(\"t\", [\"id\"], \"k\", \"v\", \"sum\")", one(lng)), "t_pivot");
    CHECK(pv.column_names() == std::vector<std::string>{"id", "x", "y"});
    CHECK(pv.rows() == std::vector<Row>{{1, 10, 20}});

    auto st = out(run("Stack(\"t_pivot\", [\"id\"], [\"x\", \"y\"])", one(pv)), "t_pivot_stack");
    CHECK(st.column_names() == std::vector<std::string>{"id", "variable", "value"});
    CHECK(st.rows() == std::vector<Row>{{1, "x", 10}, {1, "y", 20}});

    auto dupl = Table::infer("t", {"id", "k", "v"}, {{1, "x", 10}, {1, "x", 20}});
    CHECK_FALSE(run("Pivot(\"t\", [\"id\"], \"k\", \"v\", \"first_strict\")", one(dupl)).has_value());

    auto wide = Table::infer("t", {"id", "x_2020", "x_2021", "note"}, {{1, 5, 6, "n"}});
    auto wl = out(run("WideToLong(\"t\", [\"x\"], [\"id\"], \"year\")", one(wide)), "t_long");
    CHECK(wl.column_names() == std::vector<std::string>{"id", "year", "x"});
    CHECK(wl.rows() == std::vector<Row>{{1, "2020", 5}, {1, "2021", 6}});

    auto small = Table::infer("t", {"a", "b"}, {{1, Value{}}, {2, "z"}});
    auto tr = out(run("Transpose(\"t\")", one(small)), "t_transpose");
    CHECK(tr.column_names() == std::vector<std::string>{"column", "r0", "r1"});
    CHECK(tr.rows() == std::vector<Row>{{"a", "1", "2"}, {"b", Value{}, "z"}});
}

TEST_CASE("stack inverts pivot for duplicate-free long tables") {
    testing::Rng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Row> rows;
        const std::vector<std::string> keys{"x", "y", "z"};
        const auto ids = 1 + testing::pick(rng, 4);
        for (std::size_t id = 0; id < ids; ++id) {
            for (const auto& k : keys) rows.push_back({static_cast<std::int64_t>(id), k, testing::random_scalar(rng, Kind::Integer, 0.0)});
        }
        std::shuffle(rows.begin(), rows.end(), rng);
        auto t = Table::infer("t", {"id", "variable", "value"}, rows);
        auto pv = out(run("Pivot(\"t\", [\"id\"], \"variable\", \"value\", \"first_strict\")", one(t)), "t_pivot");
        const auto cols = pv.column_names();
        std::string vars;
        for (std::size_t i = 1; i < cols.size(); ++i) vars += (i > 1 ? ", \"" : "\"") + cols[i] + "\"";
        auto st = out(run("Stack(\"t_pivot\", [\"id\"], [" + vars + "])", one(pv)), "t_pivot_stack");
        CHECK(tables_equal(st, t));
    }
}

TEST_CASE("explode after a concat group-by restores element multisets") {
    testing::Rng rng(73);
    for (int trial = 0; trial < 100; ++trial) {
        auto t = testing::random_table(rng, "t", {{"g", Kind::Integer}, {"s", Kind::Text}}, testing::pick(rng, 9), 0.0);
        auto grouped = out(run("GroupBy(\"t\", [\"g\"], {\"s\": \"concat\"})", one(t)), "t");
        auto back = out(run("Explode(\"t\", \"s_concat\")", one(grouped)), "t");
        std::multiset<std::string> before;
        std::multiset<std::string> after;
        for (const auto& r : t.rows()) before.insert(render(r[0]) + "|" + render(r[1]));
        for (const auto& r : back.rows()) after.insert(render(r[0]) + "|" + render(r[1]));
        CHECK(before == after);
    }
}

TEST_CASE("execution is pure and local") {
    testing::Rng rng(79);
    const std::vector<std::string> calls{
        "Deduplicate(\"a\", null, \"first\")", "DropNA(\"a\", null, \"any\")", "Transpose(\"a\")",
        "TopK(\"a\", 2)", "Count(\"a\")", "Union([\"a\", \"a\"], \"all\")", "Sort(\"a\", [\"a\"], true)",
        "Filter(\"a\", \"col(\\\"zz\\\")\")",
    };
    for (int i = 0; i < 100; ++i) {
        auto a = testing::random_table(rng, "a");
        auto b = testing::random_table(rng, "b");
        TableSet state({a, b});
        const auto before_a = state.find("a");
        for (const auto& call : calls) {
            auto r = run(call, state);
            CHECK(state.find("a").get() == before_a.get());
            CHECK(state.find("a")->rows() == a.rows());
            if (r.has_value()) {
                CHECK(r.value().find("b").get() == state.find("b").get());
            }
        }
    }
}

TEST_CASE("ExeCode dispatches to a script backend") {
    auto t = Table::infer("t", {"a", "b"}, {{1, "x"}, {2, "y"}});
    auto none = run("ExeCode([\"t\"], \"out\", \"ignored\")", one(t));
    REQUIRE_FALSE(none.has_value());
    CHECK(none.error().message.find("backend disabled") != std::string::npos);

    if (!have_sh()) return;
    ExecContext ctx;
    // echo back the first input table: drop the section marker line
    ctx.script_backend = std::make_shared<SubprocessBackend>(std::vector<std::string>{"/bin/sh"},
                                                             std::chrono::milliseconds(5000));
    auto echoed = run("ExeCode([\"t\"], \"out\", \"sed -n '2,$p'\")", one(t), ctx);
    auto o = out(echoed, "out");
    CHECK(tables_equal(o, t));
    CHECK(echoed.value().find("t").get() != nullptr);

    auto failing = run("ExeCode([\"t\"], \"out\", \"exit 3\")", one(t), ctx);
    REQUIRE_FALSE(failing.has_value());
    CHECK(failing.error().detail == "nonzero exit");

    ExecContext slow;
    slow.script_backend = std::make_shared<SubprocessBackend>(std::vector<std::string>{"/bin/sh"},
                                                              std::chrono::milliseconds(200));
    TableSet state = one(t);
    auto timed = run("ExeCode([\"t\"], \"out\", \"sleep 5\")", state, slow);
    REQUIRE_FALSE(timed.has_value());
    CHECK(timed.error().detail == "timeout");
    CHECK_FALSE(state.contains("out"));
}
