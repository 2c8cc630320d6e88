// One PASS/FAIL line per acceptance criterion; exit status is nonzero if any fails.

#include "oracle/reference.hpp"
#include "support/gen.hpp"
#include "support/random_policy.hpp"

#include <adp/harness.hpp>
#include <adp/table_io.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>

using namespace adp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

auto reply(const std::string& plan, const std::string& decision) -> std::string {
    return "<plan>" + plan + "</plan>\n" + decision;
}

auto scratch(const std::string& name) -> fs::path {
    auto dir = fs::temp_directory_path() / ("adp_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

auto movies_bundle(const std::string& id) -> TaskBundle {
    SynthesisRequest r;
    r.task_id = id;
    r.clean_sources = testing::movies_sources();
    r.task_pipeline = parse_pipeline(testing::movies_pipeline_text());
    return synthesize_task(r);
}

auto movies_replies() -> std::vector<std::string> {
    const auto plan = "deduplicate movies by id, join directors on director_id into movies_directors_join, keep title name year";
    const auto ops = testing::movies_pipeline_text();
    return {reply(plan, "<expand>\nparent: root\n" + ops + "</expand>"),
            reply("the movies_directors_join table has title name year; answer with it", "<answer>\n" + ops + "</answer>")};
}

auto c1_oracle() -> Outcome {
    const auto start = std::chrono::steady_clock::now();
    testing::Rng rng(1001);
    std::size_t cases = 0;
    std::size_t mismatches = 0;
    std::string first;
    for (const auto kind : oracle::deterministic_kinds()) {
        for (int i = 0; i < 500; ++i) {
            const auto c = oracle::make_case(kind, rng);
            const auto v = oracle::check(c);
            ++cases;
            if (!v.agree) {
                ++mismatches;
                if (first.empty()) first = c.call + ": " + v.why;
            }
        }
    }
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream d;
    d << cases << " cases over " << oracle::deterministic_kinds().size() << " operators, " << mismatches
      << " mismatches, " << secs << " s";
    if (!first.empty()) d << "; first: " << first;
    return {mismatches == 0 && secs < 120.0, d.str()};
}

auto c2_exact_match() -> Outcome {
    testing::Rng rng(1002);
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
        auto t = testing::random_table(rng, "t");
        while (t.row_count() == 0) t = testing::random_table(rng, "t");
        if (!tables_equal(t, testing::permuted(rng, t))) ++bad;
        if (tables_equal(t, testing::flip_one_cell(rng, t))) ++bad;
    }
    return {bad == 0, "1000 tables, " + std::to_string(bad) + " counterexamples"};
}

auto c3_partial() -> Outcome {
    const auto abc = Table::infer("p", {"a", "b", "c"}, {});
    const auto bcd = Table::infer("q", {"b", "c", "d"}, {});
    const bool sch = schema_similarity(abc, bcd) == 0.5;
    const bool shp = std::abs(shape_similarity(150, 100) - 0.6065306597) < 1e-6;
    testing::Rng rng(1003);
    std::size_t out_of_range = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto a = testing::random_table(rng, "a");
        const auto b = testing::chance(rng, 0.3) ? testing::permuted(rng, a) : testing::random_table(rng, "b");
        const auto p = partial_reward(a, b);
        for (double v : {p.s_sch, p.s_shp, p.s_cnt}) out_of_range += (v >= 0.0 && v <= 1.0) ? 0 : 1;
    }
    std::ostringstream d;
    d << "s_sch=" << (sch ? "0.5" : "wrong") << ", s_shp " << (shp ? "matches" : "differs")
      << ", 1000 pairs with " << out_of_range << " out-of-range scores";
    return {sch && shp && out_of_range == 0, d.str()};
}

auto c4_tree() -> Outcome {
    testing::RandomPolicy policy(1004);
    testing::Rng rng(1004);
    std::size_t nodes = 0;
    std::size_t violations = 0;
    for (int i = 0; i < 200; ++i) {
        auto task = testing::random_task(rng, "tree" + std::to_string(i));
        Episode episode(task, EpisodeConfig{});
        auto session = policy.start(task);
        const auto traj = episode.run(*session);
        const auto& tree = episode.tree();
        std::size_t created = 0;
        for (const auto& turn : traj.turns) {
            created += turn.created_paths.size();
            if (turn.failure && turn.created_paths.size() >= turn.expand.ops.size()) ++violations;
        }
        if (tree.size() != 1 + created) ++violations;
        for (const auto& node : tree.nodes()) {
            ++nodes;
            const auto path = extract_answer_path(tree, node.id);
            if (tree.resolve_parent(path) != node.id) ++violations;
            const auto trace = run_pipeline({task.sources, path});
            if (!trace.ok() || !table_sets_equal(trace.last(), node.state)) ++violations;
        }
    }
    return {violations == 0, "200 episodes, " + std::to_string(nodes) + " nodes, " + std::to_string(violations) +
                                 " violations"};
}

auto c5_turn_limit() -> Outcome {
    testing::RandomPolicy policy(1005);
    testing::Rng rng(1005);
    EpisodeConfig config;
    config.max_turns = 5;
    std::size_t longest = 0;
    for (int i = 0; i < 100; ++i) {
        const auto traj = run_episode(testing::random_task(rng, "fuzz" + std::to_string(i)), policy, config);
        longest = std::max(longest, traj.turns.size());
    }
    return {longest <= 5, "100 episodes, longest " + std::to_string(longest) + " turns"};
}

// Drops wall_time and the cost derived from it.
void strip_timing(nlohmann::ordered_json& j) {
    if (j.is_object()) {
        j.erase("wall_time");
        j.erase("cost");
        for (auto& [k, v] : j.items()) strip_timing(v);
    } else if (j.is_array()) {
        for (auto& v : j) strip_timing(v);
    }
}

auto stripped_logs(const fs::path& log_dir) -> std::map<std::string, std::string> {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(log_dir)) {
        std::istringstream in(read_text_file(e.path()));
        std::string line;
        std::string text;
        while (std::getline(in, line)) {
            auto j = nlohmann::ordered_json::parse(line);
            strip_timing(j);
            text += j.dump() + "\n";
        }
        out[e.path().filename().string()] = text;
    }
    return out;
}

auto c6_replay() -> Outcome {
    const auto task = movies_bundle("movies").task();
    ScriptedPolicy policy(movies_replies());
    std::vector<std::string> logs;
    for (int i = 0; i < 3; ++i) logs.push_back(trajectory_to_jsonl(run_episode(task, policy), {}, false));
    const bool runs_equal = logs[0] == logs[1] && logs[1] == logs[2];

    const auto tasks = scratch("replay_tasks");
    std::map<std::string, std::vector<std::string>> by_task;
    for (int i = 0; i < 16; ++i) {
        const auto id = "movies" + std::to_string(i);
        write_bundle(tasks / id, movies_bundle(id));
        by_task[id] = movies_replies();
    }
    RuleJudge judge;
    std::vector<std::map<std::string, std::string>> per_workers;
    for (const std::size_t workers : {1, 8}) {
        ScriptedPolicy scripted(by_task);
        HarnessConfig config;
        config.parallelism = workers;
        const auto out = scratch("replay_out" + std::to_string(workers));
        (void)run_benchmark(tasks, out, scripted, judge, config);
        per_workers.push_back(stripped_logs(out / "logs"));
    }
    const bool parallel_equal = per_workers[0] == per_workers[1] && per_workers[0].size() == 16;
    return {runs_equal && parallel_equal,
            std::string("3 runs ") + (runs_equal ? "identical" : "differ") + ", 16 logs at parallelism 1 vs 8 " +
                (parallel_equal ? "identical" : "differ")};
}

// Clean movies with a date column and a lowercase column so every corruption kind has a target.
auto rich_movies() -> TableSet {
    auto movies = Table::infer("movies", {"id", "title", "director_id", "year", "released", "genre"},
                               {{1, "Alien", 10, 1979, "1979-05-25", "horror"},
                                {2, "Heat", 11, 1995, "1995-12-15", "crime"},
                                {3, "Ran", 12, 1985, "1985-06-01", "drama"},
                                {4, "Thief", 11, 1981, "1981-03-27", "crime"},
                                {5, "Ikiru", 12, 1952, "1952-10-09", "drama"},
                                {6, "Legend", 10, 1985, "1985-12-13", "fantasy"}});
    auto sources = testing::movies_sources();
    sources.put(movies);
    return sources;
}

auto c7_synthesis() -> Outcome {
    testing::Rng rng(1007);
    const std::vector<std::pair<CorruptionKind, std::string>> menu{
        {CorruptionKind::DedupInverse, "id"},       {CorruptionKind::DedupInverse, ""},
        {CorruptionKind::DropnaInverse, "title"},   {CorruptionKind::DatetimeInverse, "released"},
        {CorruptionKind::CasingInverse, "genre"},   {CorruptionKind::TypeInverse, "year"}};
    std::size_t bundles = 0;
    std::size_t invalid = 0;
    for (int i = 0; i < 100; ++i) {
        SynthesisRequest r;
        r.task_id = "synth" + std::to_string(i);
        r.clean_sources = rich_movies();
        r.task_pipeline = parse_pipeline(testing::movies_pipeline_text());
        const auto depth = testing::pick(rng, 4);
        for (std::size_t k = 0; k < depth; ++k) {
            const auto& [kind, column] = testing::pick_from(rng, menu);
            Corruption c;
            c.id = "c" + std::to_string(k);
            c.kind = kind;
            c.table = "movies";
            c.column = column;
            c.seed = rng();
            c.intensity = 0.2 + 0.2 * static_cast<double>(testing::pick(rng, 4));
            r.plan.push_back(c);
        }
        try {
            const auto b = synthesize_task(r);
            ++bundles;
            const auto dir = scratch("synth");
            write_bundle(dir / b.task_id, b);
            if (check_bundle(b) || check_bundle(read_bundle(dir / b.task_id))) ++invalid;
        } catch (const SynthesisError&) {
            ++invalid;
        }
    }

    Corruption casing;
    casing.id = "casing";
    casing.kind = CorruptionKind::CasingInverse;
    casing.table = "t";
    casing.column = "country";
    casing.intensity = 1.0;
    const TableSet ambiguous({Table::infer("t", {"country"}, {{"USA"}, {"usa"}, {"Peru"}})});
    const auto rejected = corrupt_reversibly(ambiguous, casing);
    const bool casing_ok = !rejected.accepted && rejected.reason == "restore check failed";

    std::size_t stacks = 0;
    std::size_t stack_failures = 0;
    for (std::uint64_t seed = 0; stacks < 50 && seed < 10000; ++seed) {
        testing::Rng srng(seed);
        const TableSet clean = rich_movies();
        TableSet state = clean;
        OpList cleaners;
        for (int attempt = 0; attempt < 12 && cleaners.size() < 3; ++attempt) {
            const auto& [kind, column] = testing::pick_from(srng, menu);
            Corruption c;
            c.kind = kind;
            c.table = "movies";
            c.column = column;
            c.seed = srng();
            c.intensity = 0.5;
            auto out = corrupt_reversibly(state, c);
            if (!out.accepted) continue;
            state = out.state;
            cleaners.push_back(*out.cleaner);
        }
        if (cleaners.size() != 3) continue;
        ++stacks;
        const auto trace = run_pipeline({state, OpList(cleaners.rbegin(), cleaners.rend())});
        if (!trace.ok() || !table_sets_equal(trace.last(), clean)) ++stack_failures;
    }
    std::ostringstream d;
    d << bundles << " bundles, " << invalid << " invalid; ambiguous casing " << (casing_ok ? "rejected" : "accepted")
      << "; " << stacks << " three-corruption stacks, " << stack_failures << " not restored";
    return {invalid == 0 && casing_ok && stacks == 50 && stack_failures == 0, d.str()};
}

auto c8_harness() -> Outcome {
    const auto tasks = scratch("harness_tasks");
    for (int i = 0; i < 4; ++i) {
        SynthesisRequest r;
        r.task_id = "task" + std::to_string(i);
        r.clean_sources = TableSet({Table::infer("t", {"k", "v"}, {{i, "x"}, {i + 1, "y"}, {i + 2, "z"}})});
        write_bundle(tasks / r.task_id, synthesize_task(r));
    }
    std::vector<std::string> loop(10, reply("count t", "<expand>\nparent: root\nCount(\"t\")\n</expand>"));
    // answered right, answered right, answered wrong, turn limit: 2/4 exact, 3/4 completed
    ScriptedPolicy policy(std::map<std::string, std::vector<std::string>>{
        {"task0", {reply("t is already right", "<answer>\ntarget: t\n</answer>")}},
        {"task1", {reply("t is already right", "<answer>\ntarget: t\n</answer>")}},
        {"task2", {reply("keep one row of t", "<expand>\nparent: root\nTopK(\"t\", 1)\n</expand>"),
                   reply("answer with the short t", "<answer>\nTopK(\"t\", 1)\n</answer>")}},
        {"task3", loop}});
    RuleJudge judge;
    const auto report = run_benchmark(tasks, scratch("harness_out"), policy, judge, HarnessConfig{});
    Trajectory hour;
    hour.wall_time = 3600.0;
    const auto bundle = read_bundle(tasks / "task0");
    const double cost = score_case(hour, bundle, RewardWeights{}, judge, 0.91).cost;
    const bool cost_ok = std::abs(cost - 0.91) < 1e-9;
    std::ostringstream d;
    d << "Acc " << report.accuracy << "% (expected 50), Comp " << report.completion << "% (expected 75), cost of 3600 s "
      << cost;
    return {report.accuracy == 50.0 && report.completion == 75.0 && cost_ok, d.str()};
}

auto c9_movies() -> Outcome {
    const auto bundle = movies_bundle("movies");
    ScriptedPolicy policy(movies_replies());
    const auto traj = run_episode(bundle.task(), policy);
    RuleJudge judge;
    const auto row = score_case(traj, bundle, RewardWeights{}, judge, 0.91);
    const RewardWeights w;
    const bool has_ops = bundle.gt_pipeline.size() == 3 && bundle.gt_pipeline[0].kind() == OpKind::Deduplicate &&
                         bundle.gt_pipeline[1].kind() == OpKind::Join && bundle.target_name == "movies_directors_join";
    std::ostringstream d;
    d << "status " << row.status << ", r_out " << row.r_out << ", r_part " << row.r_part << ", r_llm " << row.r_llm
      << ", total " << row.total << " (expected " << w.alpha + w.beta + w.gamma << ")";
    return {has_ops && row.r_out == 1 && row.r_part == 1.0 && row.r_llm == 1.0 &&
                std::abs(row.total - (w.alpha + w.beta + w.gamma)) < 1e-12,
            d.str()};
}

} // namespace

auto main() -> int {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"operator oracle suite", c1_oracle},        {"exact-match metric", c2_exact_match},
        {"partial-reward closed forms", c3_partial}, {"tree invariants", c4_tree},
        {"interaction limit", c5_turn_limit},        {"replay determinism", c6_replay},
        {"synthesis soundness", c7_synthesis},       {"harness arithmetic", c8_harness},
        {"movies end-to-end fixture", c9_movies}};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
