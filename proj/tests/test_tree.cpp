#include <doctest.h>

#include "support/gen.hpp"
#include "support/random_policy.hpp"

#include <adp/tree.hpp>

using namespace adp;

namespace {

auto ops(const std::string& text) -> OpList { return parse_pipeline(text); }

} // namespace

TEST_CASE("tree examples") {
    ReasoningTree tree(testing::movies_sources());
    CHECK(tree.resolve_parent({}) == tree.root());
    CHECK(tree.node(0).parent == std::nullopt);

    auto chain = tree.expand_and_execute(0, ops("TopK(\"movies\", 3)\nDeduplicate(\"movies\", [\"id\"], \"first\")\nCount(\"movies\")\n"), 1);
    CHECK(chain.created.size() == 3);
    CHECK(tree.size() == 4);
    CHECK_FALSE(chain.failure);
    const auto path = extract_answer_path(tree, chain.leaf);
    CHECK(path.size() == 3);
    CHECK(tree.resolve_parent(path) == chain.leaf);
    CHECK(tree.node(chain.leaf).depth == 3);

    auto typo = path;
    typo[1] = parse_operator_call("Deduplicate(\"movies\", [\"id\"], \"last\")");
    try {
        (void)tree.resolve_parent(typo);
        FAIL("expected a path error");
    } catch (const PathError& e) {
        CHECK(e.index() == 1);
    }

    auto first_bad = tree.expand_and_execute(0, ops("Count(\"nosuch\")\nCount(\"movies\")\n"), 2);
    CHECK(tree.size() == 4);
    REQUIRE(first_bad.failure);
    CHECK(first_bad.leaf == 0);
    CHECK(tree.node(0).failures.size() == 1);
    CHECK(tree.node(0).failures[0].turn == 2);

    auto partial = tree.expand_and_execute(0, ops("TopK(\"movies\", 1)\nCount(\"nosuch\")\n"), 3);
    CHECK(tree.size() == 5);
    REQUIRE(partial.created.size() == 1);
    CHECK(tree.node(partial.created[0]).failures.size() == 1);

    // re-expanding an existing edge reuses the child
    auto again = tree.expand_and_execute(0, ops("TopK(\"movies\", 3)\n"), 4);
    CHECK(tree.size() == 5);
    CHECK(again.leaf == chain.created[0]);
    CHECK(extract_answer_path(tree, 0).empty());
}

TEST_CASE("tree invariants under random expansion") {
    testing::Rng rng(151);
    for (int episode = 0; episode < 60; ++episode) {
        TableSet sources({testing::random_table(rng, "a"), testing::random_table(rng, "b")});
        ReasoningTree tree(sources);
        for (std::size_t turn = 1; turn <= 6; ++turn) {
            const auto parent = testing::pick(rng, tree.size());
            OpList chain;
            const auto n = 1 + testing::pick(rng, 3);
            for (std::size_t k = 0; k < n; ++k) {
                chain.push_back(parse_operator_call(testing::random_call(rng, tree.node(parent).state)));
            }
            const auto before = tree.size();
            auto outcome = tree.expand_and_execute(parent, chain, turn);
            CHECK(tree.size() == before + outcome.created.size());
            CHECK(outcome.created.size() <= chain.size());
        }
        for (const auto& node : tree.nodes()) {
            const auto path = extract_answer_path(tree, node.id);
            CHECK(tree.resolve_parent(path) == node.id);
            auto trace = run_pipeline({sources, path});
            REQUIRE(trace.ok());
            CHECK(table_sets_equal(trace.last(), node.state));
        }
    }
}

TEST_CASE("snapshot lists nodes with paths and failures") {
    ReasoningTree tree(testing::movies_sources());
    tree.expand_and_execute(0, ops("Count(\"movies\")\nCount(\"nosuch\")\n"), 1);
    const auto snap = tree.snapshot();
    REQUIRE(snap["nodes"].size() == 2);
    CHECK(snap["nodes"][1]["path"] == "Count(\"movies\")\n");
    CHECK(snap["nodes"][1]["failures"].size() == 1);
    CHECK(snap["nodes"][1]["parent"] == 0);
    CHECK(snap.dump() == tree.snapshot().dump());
}
