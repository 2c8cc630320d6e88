#include <adp/harness.hpp>
#include <adp/table_io.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

using namespace adp;
using json = nlohmann::ordered_json;

struct PolicyOptions {
    std::string kind = "identity";
    std::string replies;
    ChatConfig chat;
};

struct Common {
    PolicyOptions policy;
    std::string judge = "rule";
    HarnessConfig harness;
    std::string script_cmd;
    long script_timeout_ms = 10000;
    std::vector<double> token_pricing;
};

void add_policy_flags(CLI::App* app, Common& c) {
    app->add_option("--policy", c.policy.kind, "identity, scripted or chat")
        ->check(CLI::IsMember({"identity", "scripted", "chat"}));
    app->add_option("--replies", c.policy.replies, "JSON file of canned replies for the scripted policy");
    app->add_option("--url", c.policy.chat.url, "chat endpoint (http)");
    app->add_option("--model", c.policy.chat.model, "model name sent to the chat endpoint");
    app->add_option("--temperature", c.policy.chat.temperature, "sampling temperature");
    app->add_option("--api-key", c.policy.chat.api_key, "bearer token for the chat endpoint");
    app->add_option("--judge", c.judge, "process judge: rule or chat")->check(CLI::IsMember({"rule", "chat"}));
    app->add_option("--max-turns", c.harness.episode.max_turns, "plan/expand cycles per episode")
        ->check(CLI::PositiveNumber);
    app->add_option("--sample-rows", c.harness.episode.sample_rows, "rows shown per table in observations");
    app->add_option("--history-window", c.harness.episode.history_window,
                    "exchanges kept in the conversation (0 keeps all)");
    app->add_option("--alpha", c.harness.weights.alpha, "outcome reward weight");
    app->add_option("--beta", c.harness.weights.beta, "partial reward weight");
    app->add_option("--gamma", c.harness.weights.gamma, "process reward weight");
    app->add_option("--price", c.harness.gpu_hourly_price, "hourly price in USD for the cost column")
        ->check(CLI::PositiveNumber);
    app->add_option("--token-pricing", c.token_pricing,
                    "USD per million input, output and cached-input tokens; costs chat runs per token")
        ->expected(3)
        ->check(CLI::NonNegativeNumber);
    app->add_option("--script-cmd", c.script_cmd, "interpreter for ExeCode scripts, e.g. python3 (off by default)");
    app->add_option("--script-timeout", c.script_timeout_ms, "ExeCode timeout in ms")->check(CLI::PositiveNumber);
}

auto split_words(const std::string& s) -> std::vector<std::string> {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

void finalize(Common& c) {
    if (!c.token_pricing.empty()) {
        c.harness.token_pricing = TokenPricing{c.token_pricing[0], c.token_pricing[1], c.token_pricing[2]};
    }
    if (!c.script_cmd.empty()) {
        c.harness.episode.exec.script_backend = std::make_shared<SubprocessBackend>(
            split_words(c.script_cmd), std::chrono::milliseconds(c.script_timeout_ms));
    }
}

auto make_policy(const PolicyOptions& o) -> std::unique_ptr<Policy> {
    if (o.kind == "scripted") {
        if (o.replies.empty()) throw Error("--policy scripted needs --replies");
        return std::make_unique<ScriptedPolicy>(ScriptedPolicy::from_file(o.replies));
    }
    if (o.kind == "chat") return std::make_unique<ChatPolicy>(o.chat);
    return std::make_unique<IdentityPolicy>();
}

auto make_judge(const Common& c) -> std::unique_ptr<ProcessJudge> {
    if (c.judge == "chat") return std::make_unique<ChatJudge>(c.policy.chat);
    return std::make_unique<RuleJudge>();
}

auto load_sources(const std::filesystem::path& dir) -> TableSet {
    TableSet out;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.put(read_table(f));
    return out;
}

auto load_plan(const std::filesystem::path& path, std::uint64_t base_seed) -> std::vector<Corruption> {
    const auto j = json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_array()) throw IoError("corruption plan must be a JSON array");
    std::vector<Corruption> plan;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        Corruption c;
        c.id = e.value("id", "c" + std::to_string(i));
        c.kind = parse_corruption_kind(e.at("kind").get<std::string>());
        c.table = e.at("table").get<std::string>();
        c.column = e.value("column", "");
        c.intensity = e.value("intensity", 0.2);
        c.seed = e.value("seed", base_seed + i);
        c.format = e.value("format", "%Y-%m-%d");
        plan.push_back(std::move(c));
    }
    return plan;
}

/// Candidate pipelines separated by lines holding only `---`.
auto load_candidates(const std::filesystem::path& path) -> std::vector<OpList> {
    const auto text = read_text_file(path);
    std::vector<OpList> out;
    std::string chunk;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line == "---") {
            out.push_back(parse_pipeline(chunk));
            chunk.clear();
        } else {
            chunk += line + "\n";
        }
    }
    out.push_back(parse_pipeline(chunk));
    return out;
}

auto cmd_run(Common& c, const std::string& tasks, const std::string& out) -> int {
    finalize(c);
    auto policy = make_policy(c.policy);
    auto judge = make_judge(c);
    const auto report = run_benchmark(tasks, out, *policy, *judge, c.harness);
    std::cout << report_to_text(report);
    return report.all_attempted() ? 0 : 1;
}

auto cmd_solve(Common& c, const std::string& task_dir, const std::string& log) -> int {
    finalize(c);
    auto policy = make_policy(c.policy);
    auto judge = make_judge(c);
    const auto bundle = read_bundle(task_dir);
    const auto traj = run_episode(bundle.task(), *policy, c.harness.episode);
    const auto row = score_case(traj, bundle, c.harness.weights, *judge, c.harness.gpu_hourly_price,
                                c.harness.token_pricing);
    if (!log.empty()) {
        write_text_file(log, trajectory_to_jsonl(traj, {{"reward", reward_json(row)}, {"completed", row.completed}}));
    }
    std::cout << "status: " << status_name(traj.status) << " (" << traj.status_message << ")\n";
    if (traj.final_table) std::cout << to_csv(*traj.final_table);
    std::cout << "r_out: " << row.r_out << "  r_part: " << row.r_part << "  r_llm: " << row.r_llm
              << "  total: " << row.total << "\n";
    return 0;
}

auto cmd_replay(Common& c, const std::string& task_dir, const std::string& replies) -> int {
    c.policy.kind = "scripted";
    c.policy.replies = replies;
    finalize(c);
    auto policy = make_policy(c.policy);
    auto judge = make_judge(c);
    const auto bundle = read_bundle(task_dir);
    const auto traj = run_episode(bundle.task(), *policy, c.harness.episode);
    const auto row = score_case(traj, bundle, c.harness.weights, *judge, c.harness.gpu_hourly_price,
                                c.harness.token_pricing);
    std::cout << trajectory_to_jsonl(traj, {{"reward", reward_json(row)}, {"completed", row.completed}});
    return 0;
}

auto cmd_score(Common& c, const std::string& tasks, const std::string& logs, const std::string& out) -> int {
    auto judge = make_judge(c);
    const auto report = rescore_benchmark(tasks, logs, *judge, c.harness);
    if (!out.empty()) {
        write_text_file(std::filesystem::path(out) / "report.json", report_to_json(report).dump(2) + "\n");
        write_text_file(std::filesystem::path(out) / "report.txt", report_to_text(report));
    }
    std::cout << report_to_text(report);
    return report.all_attempted() ? 0 : 1;
}

auto cmd_validate(const std::vector<std::string>& dirs) -> int {
    int bad = 0;
    for (const auto& d : dirs) {
        std::vector<std::filesystem::path> bundles;
        if (std::filesystem::exists(std::filesystem::path(d) / "target_schema.json")) {
            bundles.emplace_back(d);
        } else {
            bundles = list_bundles(d);
        }
        for (const auto& b : bundles) {
            std::string verdict;
            try {
                const auto problem = check_bundle(read_bundle(b));
                verdict = problem ? "FAIL " + *problem : "ok";
            } catch (const std::exception& e) {
                verdict = std::string("FAIL ") + e.what();
            }
            if (verdict != "ok") ++bad;
            std::cout << b.string() << ": " << verdict << "\n";
        }
    }
    return bad == 0 ? 0 : 1;
}

struct SynthArgs {
    std::string sources;
    std::string pipeline;
    std::string candidates;
    std::string target_table;
    std::string plan;
    std::string out;
    std::string task_id;
    std::string target;
    std::uint64_t seed = 0;
};

auto cmd_synth(const SynthArgs& a) -> int {
    SynthesisRequest req;
    req.clean_sources = load_sources(a.sources);
    req.task_id = a.task_id.empty() ? std::filesystem::path(a.out).filename().string() : a.task_id;
    if (!a.target.empty()) req.target_name = a.target;
    if (!a.candidates.empty()) {
        if (a.target_table.empty()) throw Error("--candidates needs --target-table");
        const auto target = read_table(a.target_table);
        const auto cands = load_candidates(a.candidates);
        const auto best = select_shortest_valid_pipeline(cands, req.clean_sources, target);
        if (!best) {
            std::cerr << "no candidate pipeline reproduces the target table\n";
            return 1;
        }
        std::cerr << "selected candidate " << *best + 1 << " of " << cands.size() << "\n";
        req.task_pipeline = cands[*best];
    } else {
        req.task_pipeline = parse_pipeline(read_text_file(a.pipeline));
    }
    if (!a.plan.empty()) req.plan = load_plan(a.plan, a.seed);
    const auto bundle = synthesize_task(req);
    write_bundle(a.out, bundle);
    std::size_t accepted = 0;
    for (const auto& p : bundle.provenance) {
        accepted += p.accepted ? 1 : 0;
        std::cerr << p.corruption.id << " " << corruption_kind_name(p.corruption.kind) << ": "
                  << (p.accepted ? "accepted" : "rejected (" + p.reason + ")") << "\n";
    }
    std::cout << "wrote " << a.out << " (" << accepted << " corruptions, " << bundle.gt_pipeline.size()
              << " ground-truth ops)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agentic data preparation environment and benchmark harness"};
    app.require_subcommand(1);
    Common common;

    std::string tasks;
    std::string out;
    auto* run = app.add_subcommand("run", "run a policy over a directory of task bundles");
    run->add_option("--tasks", tasks, "directory of task bundles")->required();
    run->add_option("--out", out, "output directory for logs and reports")->required();
    run->add_option("--parallelism", common.harness.parallelism, "concurrent episodes")->check(CLI::PositiveNumber);
    run->add_option("--seed", common.harness.seed, "seed recorded with the run");
    add_policy_flags(run, common);

    std::string task_dir;
    std::string log;
    auto* solve = app.add_subcommand("solve", "solve one task bundle and print the final table");
    solve->add_option("task", task_dir, "task bundle directory")->required();
    solve->add_option("--log", log, "write the trajectory log here");
    add_policy_flags(solve, common);

    std::string replies;
    auto* replay = app.add_subcommand("replay", "re-drive an episode from a scripted reply file");
    replay->add_option("task", task_dir, "task bundle directory")->required();
    replay->add_option("reply_file", replies, "JSON reply file")->required();
    add_policy_flags(replay, common);

    std::string logs;
    auto* score = app.add_subcommand("score", "re-score stored trajectory logs");
    score->add_option("--tasks", tasks, "directory of task bundles")->required();
    score->add_option("--logs", logs, "directory of <task>.jsonl logs")->required();
    score->add_option("--out", out, "write report.json and report.txt here");
    add_policy_flags(score, common);

    std::vector<std::string> validate_dirs;
    auto* validate = app.add_subcommand("validate", "check that bundles reproduce their target tables");
    validate->add_option("dirs", validate_dirs, "bundle directories or directories of bundles")->required();

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "build a task bundle from clean sources");
    synth->add_option("--sources", synth_args.sources, "directory of clean source csv files")->required();
    synth->add_option("--pipeline", synth_args.pipeline, "task pipeline file");
    synth->add_option("--candidates", synth_args.candidates, "candidate pipelines separated by `---` lines");
    synth->add_option("--target-table", synth_args.target_table, "target table csv for candidate selection");
    synth->add_option("--plan", synth_args.plan, "JSON corruption plan");
    synth->add_option("--out", synth_args.out, "bundle directory to write")->required();
    synth->add_option("--task-id", synth_args.task_id, "task id (defaults to the bundle directory name)");
    synth->add_option("--target", synth_args.target, "target table name");
    synth->add_option("--seed", synth_args.seed, "base seed for corruptions without their own");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(common, tasks, out);
        if (*solve) return cmd_solve(common, task_dir, log);
        if (*replay) return cmd_replay(common, task_dir, replies);
        if (*score) return cmd_score(common, tasks, logs, out);
        if (*validate) return cmd_validate(validate_dirs);
        if (*synth) {
            if (synth_args.pipeline.empty() == synth_args.candidates.empty()) {
                std::cerr << "synth needs exactly one of --pipeline or --candidates\n";
                return 2;
            }
            return cmd_synth(synth_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
