#include <doctest.h>

#include "support/gen.hpp"

#include <adp/synthesis.hpp>
#include <adp/table_io.hpp>

#include <filesystem>

using namespace adp;

namespace {

auto people() -> Table {
    return Table::infer("people", {"id", "name", "joined", "score"},
                        {{1, "ada", "2023-01-01", 10},
                         {2, "bob", "2022-12-31", 20},
                         {3, "cy", "2021-06-15", 30},
                         {4, "dee", "2020-02-29", 40},
                         {5, "eve", "2019-11-03", 50},
                         {6, "fay", "2018-07-04", 60}});
}

auto corruption(CorruptionKind kind, const std::string& column, std::uint64_t seed, double intensity = 0.5) -> Corruption {
    Corruption c;
    c.id = std::string(corruption_kind_name(kind)) + "_" + std::to_string(seed);
    c.kind = kind;
    c.table = "people";
    c.column = column;
    c.seed = seed;
    c.intensity = intensity;
    return c;
}

auto files_of(const std::filesystem::path& dir) -> std::map<std::string, std::string> {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out[std::filesystem::relative(e.path(), dir).string()] = read_text_file(e.path());
    }
    return out;
}

auto temp_dir(const std::string& name) -> std::filesystem::path {
    auto dir = std::filesystem::temp_directory_path() / ("adp_synth_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

auto task_request() -> SynthesisRequest {
    SynthesisRequest r;
    r.task_id = "people_task";
    r.clean_sources = TableSet({people()});
    r.task_pipeline = parse_pipeline("Filter(\"people\", \"col(\\\"score\\\") > 15\")\nSelectColumn(\"people\", [\"name\", \"joined\", \"score\"])\n");
    return r;
}

} // namespace

TEST_CASE("each corruption kind round trips through its cleaner") {
    const TableSet clean({people()});
    struct Case {
        CorruptionKind kind;
        std::string column;
        OpKind cleaner;
    };
    for (const auto& [kind, column, cleaner] : std::vector<Case>{{CorruptionKind::DedupInverse, "id", OpKind::Deduplicate},
                                                                 {CorruptionKind::DedupInverse, "", OpKind::Deduplicate},
                                                                 {CorruptionKind::DropnaInverse, "name", OpKind::DropNA},
                                                                 {CorruptionKind::DatetimeInverse, "joined", OpKind::StandardizeDatetime},
                                                                 {CorruptionKind::CasingInverse, "name", OpKind::ValueTransform},
                                                                 {CorruptionKind::TypeInverse, "score", OpKind::CastType}}) {
        INFO(corruption_kind_name(kind));
        auto out = corrupt_reversibly(clean, corruption(kind, column, 17));
        REQUIRE(out.accepted);
        REQUIRE(out.cleaner);
        CHECK(out.cleaner->kind() == cleaner);
        CHECK_FALSE(table_sets_equal(out.state, clean));
        auto restored = execute_operator(*out.cleaner, out.state);
        REQUIRE(restored.has_value());
        CHECK(table_sets_equal(restored.value(), clean));
    }
    auto dup = corrupt_reversibly(clean, corruption(CorruptionKind::DedupInverse, "id", 3));
    CHECK(dup.state.find("people")->row_count() == 9);
    auto typed = corrupt_reversibly(clean, corruption(CorruptionKind::TypeInverse, "score", 3));
    CHECK(typed.state.find("people")->schema().columns[3].dtype == Kind::Text);
}

TEST_CASE("datetime corruption turns iso dates into other spellings") {
    auto t = Table::infer("people", {"d"}, {{"2023-01-01"}});
    Corruption c;
    c.kind = CorruptionKind::DatetimeInverse;
    c.table = "people";
    c.column = "d";
    c.intensity = 1.0;
    bool saw_short = false;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        c.seed = seed;
        auto out = corrupt_reversibly(TableSet({t}), c);
        REQUIRE(out.accepted);
        saw_short = saw_short || out.state.find("people")->rows()[0][0] == Value("01/01/23");
        auto restored = execute_operator(*out.cleaner, out.state);
        CHECK(restored.value().find("people")->rows()[0][0] == Value("2023-01-01"));
    }
    CHECK(saw_short);
}

TEST_CASE("ambiguous casing is rejected by the restore check") {
    auto t = Table::infer("people", {"country"}, {{"USA"}, {"usa"}, {"Peru"}});
    const TableSet state({t});
    Corruption c;
    c.id = "casing";
    c.kind = CorruptionKind::CasingInverse;
    c.table = "people";
    c.column = "country";
    c.intensity = 1.0;
    c.seed = 1;
    auto out = corrupt_reversibly(state, c);
    CHECK_FALSE(out.accepted);
    CHECK(out.reason == "restore check failed");
    CHECK(out.state.find("people").get() == state.find("people").get());
}

TEST_CASE("corruptions that cannot apply are rejected with a reason") {
    const TableSet clean({people()});
    CHECK(corrupt_reversibly(clean, corruption(CorruptionKind::TypeInverse, "name", 1)).reason == "column is not numeric");
    CHECK(corrupt_reversibly(clean, corruption(CorruptionKind::CasingInverse, "nope", 1)).reason == "missing column nope");
    CHECK_FALSE(corrupt_reversibly(clean, corruption(CorruptionKind::DedupInverse, "id", 1, 0.0)).accepted);
    CHECK_FALSE(corrupt_reversibly(clean, corruption(CorruptionKind::DatetimeInverse, "name", 1)).accepted);
    // upper-casing an already upper column changes nothing
    auto caps = Table::infer("people", {"c"}, {{"AB"}});
    Corruption c;
    c.kind = CorruptionKind::CasingInverse;
    c.table = "people";
    c.column = "c";
    c.intensity = 1.0;
    bool saw_noop = false;
    for (std::uint64_t seed = 0; seed < 20 && !saw_noop; ++seed) {
        c.seed = seed;
        saw_noop = corrupt_reversibly(TableSet({caps}), c).reason == "corruption changed nothing";
    }
    CHECK(saw_noop);
}

TEST_CASE("select_shortest_valid_pipeline examples") {
    const TableSet sources({people()});
    auto target = *run_pipeline({sources, parse_pipeline("TopK(\"people\", 2)\n")}).last().find("people");
    const auto len3 = parse_pipeline("Sort(\"people\", [\"id\"], true)\nTopK(\"people\", 4)\nTopK(\"people\", 2)\n");
    const auto len2 = parse_pipeline("TopK(\"people\", 3)\nTopK(\"people\", 2)\n");
    CHECK(select_shortest_valid_pipeline({len3, len2}, sources, target) == std::optional<std::size_t>(1));
    const auto broken = parse_pipeline("Count(\"nosuch\")\n");
    CHECK_FALSE(select_shortest_valid_pipeline({broken, broken}, sources, target));
    const auto wrong2 = parse_pipeline("TopK(\"people\", 3)\nTopK(\"people\", 1)\n");
    const auto right4 = parse_pipeline("TopK(\"people\", 5)\nTopK(\"people\", 4)\nTopK(\"people\", 3)\nTopK(\"people\", 2)\n");
    CHECK(select_shortest_valid_pipeline({wrong2, right4}, sources, target) == std::optional<std::size_t>(1));
    CHECK(select_shortest_valid_pipeline({len2, parse_pipeline("TopK(\"people\", 2)\nFilter(\"people\", \"true\")\n")},
                                         sources, target) == std::optional<std::size_t>(0));
}

TEST_CASE("synthesize_task examples") {
    auto plain = synthesize_task(task_request());
    CHECK(plain.gt_pipeline == task_request().task_pipeline);
    CHECK(table_sets_equal(plain.sources, task_request().clean_sources));
    CHECK(plain.target_name == "people");
    CHECK(plain.target_table.row_count() == 5);
    CHECK_FALSE(check_bundle(plain));

    auto req = task_request();
    req.plan.push_back(corruption(CorruptionKind::DedupInverse, "id", 5));
    auto dedup = synthesize_task(req);
    REQUIRE(dedup.gt_pipeline.size() == 3);
    CHECK(dedup.gt_pipeline[0].kind() == OpKind::Deduplicate);
    CHECK_FALSE(check_bundle(dedup));
    CHECK(dedup.sources.find("people")->row_count() > 6);

    auto mixed = task_request();
    mixed.plan.push_back(corruption(CorruptionKind::TypeInverse, "name", 5));
    mixed.plan.push_back(corruption(CorruptionKind::CasingInverse, "name", 6));
    mixed.plan.push_back(corruption(CorruptionKind::DropnaInverse, "score", 7));
    auto b = synthesize_task(mixed);
    REQUIRE(b.provenance.size() == 3);
    CHECK_FALSE(b.provenance[0].accepted);
    CHECK(b.provenance[1].accepted);
    CHECK(b.provenance[2].accepted);
    REQUIRE(b.gt_pipeline.size() == 4);
    // last corruption is cleaned first
    CHECK(b.gt_pipeline[0].kind() == OpKind::DropNA);
    CHECK(b.gt_pipeline[1].kind() == OpKind::ValueTransform);
    CHECK_FALSE(check_bundle(b));
    CHECK(b.target.description.find("name") != std::string::npos);

    auto failing = task_request();
    failing.task_pipeline = parse_pipeline("Count(\"nosuch\")\n");
    CHECK_THROWS_AS(synthesize_task(failing), SynthesisError);
}

TEST_CASE("bundles survive disk and are seed deterministic") {
    auto req = task_request();
    req.plan.push_back(corruption(CorruptionKind::DatetimeInverse, "joined", 11));
    req.plan.push_back(corruption(CorruptionKind::DedupInverse, "", 12));
    auto a = synthesize_task(req);
    auto b = synthesize_task(req);
    const auto da = temp_dir("a");
    const auto db = temp_dir("b");
    write_bundle(da, a);
    write_bundle(db, b);
    CHECK(files_of(da) == files_of(db));
    CHECK(files_of(da).count("gt_pipeline.txt") == 1);
    CHECK(files_of(da).count("target_schema.json") == 1);
    CHECK(files_of(da).count("provenance.json") == 1);
    CHECK(files_of(da).count("target_table.csv") == 1);

    auto back = read_bundle(da);
    CHECK(back.task_id == a.task_id);
    CHECK(back.gt_pipeline == a.gt_pipeline);
    CHECK(table_sets_equal(back.sources, a.sources));
    CHECK(tables_equal(back.target_table, a.target_table));
    CHECK(back.provenance.size() == 2);
    CHECK_FALSE(check_bundle(back));

    req.plan[0].seed = 99;
    req.plan[1].seed = 98;
    auto c = synthesize_task(req);
    const auto dc = temp_dir("c");
    write_bundle(dc, c);
    CHECK(files_of(dc) != files_of(da));
    CHECK_THROWS_AS(read_bundle(temp_dir("missing")), IoError);
}

TEST_CASE("stacked corruptions restore under reverse cleaning") {
    testing::Rng rng(241);
    const std::vector<std::pair<CorruptionKind, std::string>> menu{
        {CorruptionKind::DedupInverse, "id"},    {CorruptionKind::DedupInverse, ""},
        {CorruptionKind::DropnaInverse, "name"}, {CorruptionKind::DatetimeInverse, "joined"},
        {CorruptionKind::CasingInverse, "name"}, {CorruptionKind::TypeInverse, "score"}};
    std::size_t stacks = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const TableSet clean({people()});
        TableSet state = clean;
        OpList cleaners;
        const auto depth = 2 + testing::pick(rng, 2);
        for (std::size_t k = 0; k < depth; ++k) {
            const auto& [kind, column] = testing::pick_from(rng, menu);
            auto out = corrupt_reversibly(state, corruption(kind, column, rng(), 0.1 + 0.2 * static_cast<double>(testing::pick(rng, 4))));
            if (!out.accepted) continue;
            state = out.state;
            cleaners.push_back(*out.cleaner);
        }
        if (cleaners.size() >= 2) ++stacks;
        OpList reversed(cleaners.rbegin(), cleaners.rend());
        auto trace = run_pipeline({state, reversed});
        REQUIRE(trace.ok());
        CHECK(table_sets_equal(trace.last(), clean));
    }
    CHECK(stacks > 100);
}
