#include <doctest.h>

#include "support/gen.hpp"

#include <adp/reward.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using namespace adp;

namespace {

// Independent content-similarity reference: project onto shared names, sort rows, count matches.
auto content_oracle(const Table& a, const Table& b) -> double {
    std::vector<std::string> shared;
    for (const auto& n : a.column_names()) {
        if (b.column_index(n)) shared.push_back(n);
    }
    std::sort(shared.begin(), shared.end());
    if (shared.empty()) return 0.0;
    auto rows_of = [&](const Table& t) {
        std::vector<Row> out;
        for (const auto& r : t.rows()) {
            Row p;
            for (const auto& n : shared) p.push_back(r[*t.column_index(n)]);
            out.push_back(p);
        }
        std::sort(out.begin(), out.end(), [](const Row& x, const Row& y) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (const int c = compare(x[i], y[i]); c != 0) return c < 0;
            }
            return false;
        });
        return out;
    };
    const auto ra = rows_of(a);
    const auto rb = rows_of(b);
    const auto longest = std::max(ra.size(), rb.size());
    if (longest == 0) return 1.0;
    double sum = 0.0;
    for (std::size_t c = 0; c < shared.size(); ++c) {
        double hits = 0.0;
        for (std::size_t i = 0; i < std::min(ra.size(), rb.size()); ++i) hits += compare(ra[i][c], rb[i][c]) == 0 ? 1 : 0;
        sum += hits / static_cast<double>(longest);
    }
    return sum / static_cast<double>(shared.size());
}

auto op(const std::string& s) -> OperatorInstance { return parse_operator_call(s); }

auto turn(std::size_t n, const std::string& plan, const OpList& parent, const OpList& ops, const OpList& leaf)
    -> TurnRecord {
    TurnRecord r;
    r.turn = n;
    r.plan = plan;
    r.expand.ops = ops;
    r.parent_path = parent;
    r.leaf_path = leaf;
    return r;
}

} // namespace

TEST_CASE("outcome reward examples") {
    auto t = Table::infer("t", {"a", "b"}, {{1, "x"}, {2, "y"}});
    testing::Rng rng(5);
    CHECK(outcome_reward(testing::permuted(rng, t), t) == 1);
    CHECK(outcome_reward(testing::flip_one_cell(rng, t), t) == 0);
    CHECK(outcome_reward(Table::infer("t", {"a"}, {{1}, {2}}), t) == 0);
}

TEST_CASE("partial reward closed forms") {
    auto t = Table::infer("t", {"a", "b"}, {{1, "x"}, {2, "y"}});
    auto p = partial_reward(t, t);
    CHECK(p.s_sch == 1.0);
    CHECK(p.s_shp == 1.0);
    CHECK(p.s_cnt == 1.0);
    CHECK(p.r_part == 1.0);

    auto abc = Table::infer("p", {"a", "b", "c"}, {});
    auto bcd = Table::infer("q", {"b", "c", "d"}, {});
    CHECK(schema_similarity(abc, bcd) == 0.5);
    CHECK(std::abs(shape_similarity(150, 100) - 0.6065306597) < 1e-6);
    CHECK(shape_similarity(100, 100) == 1.0);
    CHECK(shape_similarity(0, 0) == 1.0);
    CHECK(shape_similarity(3, 0) == 0.0);
    CHECK(content_similarity(abc, Table::infer("z", {"z"}, {})) == 0.0);
    // both empty over shared columns
    CHECK(content_similarity(abc, bcd) == 1.0);

    // one of two cells differs in the only shared column, and one extra row
    auto got = Table::infer("g", {"a"}, {{1}, {3}, {5}});
    auto want = Table::infer("w", {"a", "b"}, {{1, 0}, {2, 0}});
    CHECK(content_similarity(got, want) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("partial reward matches the reference and stays in bounds") {
    testing::Rng rng(211);
    for (int i = 0; i < 500; ++i) {
        auto a = testing::random_table(rng, "a");
        auto b = testing::chance(rng, 0.3) ? testing::permuted(rng, a) : testing::random_table(rng, "b");
        auto p = partial_reward(a, b);
        CHECK(p.s_cnt == doctest::Approx(content_oracle(a, b)));
        for (double v : {p.s_sch, p.s_shp, p.s_cnt, p.r_part}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        if (outcome_reward(a, b) == 0) CHECK(p.r_part == doctest::Approx((p.s_sch + p.s_shp + p.s_cnt) / 3.0));
    }
}

TEST_CASE("shape similarity is monotone toward the target size") {
    for (std::size_t target = 1; target < 60; target += 7) {
        for (std::size_t n = 0; n < 200; ++n) {
            const auto closer = n < target ? n + 1 : (n > target ? n - 1 : n);
            CHECK(shape_similarity(closer, target) >= shape_similarity(n, target));
        }
    }
}

TEST_CASE("renaming columns to the target names does not fake content") {
    auto target = Table::infer("t", {"city", "pop"}, {{"Oslo", 700}, {"Rome", 2800}});
    auto wrong = Table::infer("w", {"x", "y"}, {{"Paris", 1}, {"Lima", 2}});
    auto renamed = Table::infer("w", {"city", "pop"}, wrong.rows());
    CHECK(schema_similarity(wrong, target) == 0.0);
    CHECK(schema_similarity(renamed, target) == 1.0);
    CHECK(content_similarity(renamed, target) == 0.0);
    CHECK(partial_reward(renamed, target).r_part < 1.0);
}

TEST_CASE("hybrid reward arithmetic") {
    PartialScores ones{1, 1, 1, 1};
    CHECK(hybrid_reward(1, ones, 1.0).total == doctest::Approx(1.7));
    CHECK(hybrid_reward(0, PartialScores{}, 0.0).total == 0.0);
    testing::Rng rng(223);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const int r_out = testing::chance(rng, 0.5) ? 1 : 0;
        PartialScores p{unit(rng), unit(rng), unit(rng), unit(rng)};
        CHECK(hybrid_reward(r_out, p, unit(rng), RewardWeights{1.0, 0.0, 0.0}).total == r_out);
    }
}

TEST_CASE("rule judge examples") {
    const auto a = op("TopK(\"movies\", 2)");
    const auto b = op("Count(\"movies\")");

    Trajectory clean;
    clean.turns.push_back(turn(1, "trim movies", {}, {a}, {a}));
    clean.turns.push_back(turn(2, "count movies", {a}, {b}, {a, b}));
    CHECK(RuleJudge::judge(clean).score() == 1.0);

    // switching back to the root without any failure on the abandoned branch
    Trajectory unjustified = clean;
    unjustified.turns[1] = turn(2, "count movies", {}, {b}, {b});
    auto s = RuleJudge::judge(unjustified);
    CHECK(s.justification == 0.0);
    CHECK(s.consistency == 1.0);
    CHECK(s.responsiveness == 1.0);
    CHECK(s.score() == doctest::Approx(2.0 / 3.0));

    // the same switch is justified once the branch carries a failure
    Trajectory justified = unjustified;
    const auto bad = op("Filter(\"movies\", \"col(\\\"rating\\\") > 5\")");
    justified.turns[0].failure = FailureRecord{bad, ExecError{bad, "filter failed", "missing column rating"}, 1};
    justified.turns[1].plan = "the rating column is missing; count movies instead";
    auto js = RuleJudge::judge(justified);
    CHECK(js.justification == 1.0);
    CHECK(js.responsiveness == 1.0);

    // a failure followed by a plan that ignores it
    Trajectory ignored = clean;
    ignored.turns[0].failure = FailureRecord{bad, ExecError{bad, "filter failed", "missing column rating"}, 1};
    auto is = RuleJudge::judge(ignored);
    CHECK(is.responsiveness == 0.0);
    CHECK(is.responsiveness_events == 1);

    // a plan that never names the table its ops touch
    Trajectory vague = clean;
    vague.turns[0].plan = "do something";
    CHECK(RuleJudge::judge(vague).consistency == 0.5);

    CHECK(RuleJudge::judge(Trajectory{}).score() == 1.0);
}

TEST_CASE("judge helpers") {
    CHECK(mentions_name("Join MOVIES with directors", "movies"));
    CHECK_FALSE(mentions_name("moviesdb", "movies"));
    CHECK(mentions_name("use col a_b.", "a_b"));
    CHECK(ChatJudge::parse_score("score: 0.75") == 0.75);
    CHECK(ChatJudge::parse_score("7") == 1.0);
    CHECK_THROWS_AS(ChatJudge::parse_score("none"), TransportError);
    Trajectory t;
    t.turns.push_back(turn(1, "trim movies", {}, {op("TopK(\"movies\", 2)")}, {}));
    const auto prompt = ChatJudge::prompt(t);
    CHECK(prompt.find("Plan-action consistency") != std::string::npos);
    CHECK(prompt.find("Feedback responsiveness") != std::string::npos);
    CHECK(prompt.find("Backtracking justification") != std::string::npos);
    CHECK(prompt.find("trim movies") != std::string::npos);
}
