#include <adp/harness.hpp>
#include <adp/table_io.hpp>

#include <algorithm>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adp {

namespace {

using json = nlohmann::ordered_json;

auto fixed(double v, int digits) -> std::string {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

auto bundle_id(const std::filesystem::path& dir) -> std::string { return dir.filename().string(); }

} // namespace

auto BenchmarkReport::all_attempted() const -> bool {
    return std::all_of(rows.begin(), rows.end(), [](const CaseRow& r) { return r.attempted; });
}

auto case_cost(double wall_time_seconds, double hourly_price) -> double {
    return hourly_price * wall_time_seconds / 3600.0;
}

auto token_cost(const TokenUsage& usage, const TokenPricing& pricing) -> double {
    return (static_cast<double>(usage.input) * pricing.input + static_cast<double>(usage.output) * pricing.output +
            static_cast<double>(usage.cached_input) * pricing.cached_input) /
           1e6;
}

auto score_case(const Trajectory& traj, const TaskBundle& bundle, const RewardWeights& weights, ProcessJudge& judge,
                double hourly_price, const std::optional<TokenPricing>& pricing) -> CaseRow {
    CaseRow row;
    row.task_id = bundle.task_id;
    row.status = std::string(status_name(traj.status));
    row.message = traj.status_message;
    row.completed = traj.status == EpisodeStatus::Answered && traj.final_table && traj.final_table->row_count() > 0;
    PartialScores partial;
    if (traj.final_table) partial = partial_reward(*traj.final_table, bundle.target_table);
    row.r_out = row.completed ? outcome_reward(*traj.final_table, bundle.target_table) : 0;
    const auto breakdown = hybrid_reward(row.r_out, partial, judge.score(traj), weights);
    row.s_sch = breakdown.s_sch;
    row.s_shp = breakdown.s_shp;
    row.s_cnt = breakdown.s_cnt;
    row.r_part = breakdown.r_part;
    row.r_llm = breakdown.r_llm;
    row.total = breakdown.total;
    row.wall_time = traj.wall_time;
    row.cost = pricing && traj.usage ? token_cost(*traj.usage, *pricing) : case_cost(traj.wall_time, hourly_price);
    return row;
}

auto failed_case(const std::string& task_id, const std::string& message) -> CaseRow {
    CaseRow row;
    row.task_id = task_id;
    row.status = "bundle_error";
    row.attempted = false;
    row.message = message;
    return row;
}

auto aggregate_report(std::vector<CaseRow> rows) -> BenchmarkReport {
    BenchmarkReport r;
    r.rows = std::move(rows);
    if (r.rows.empty()) return r;
    std::size_t exact = 0;
    std::size_t completed = 0;
    double cost = 0.0;
    for (const auto& row : r.rows) {
        exact += row.r_out == 1 ? 1 : 0;
        completed += row.completed ? 1 : 0;
        cost += row.cost;
    }
    const auto n = static_cast<double>(r.rows.size());
    r.accuracy = 100.0 * static_cast<double>(exact) / n;
    r.completion = 100.0 * static_cast<double>(completed) / n;
    r.mean_cost = cost / n;
    return r;
}

auto list_bundles(const std::filesystem::path& task_dir) -> std::vector<std::filesystem::path> {
    if (!std::filesystem::is_directory(task_dir)) throw IoError("task directory " + task_dir.string() + " not found");
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(task_dir)) {
        if (entry.is_directory()) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

auto reward_json(const CaseRow& row) -> json {
    return {{"r_out", row.r_out}, {"s_sch", row.s_sch}, {"s_shp", row.s_shp}, {"s_cnt", row.s_cnt},
            {"r_part", row.r_part}, {"r_llm", row.r_llm}, {"total", row.total}};
}

auto run_benchmark(const std::filesystem::path& task_dir, const std::filesystem::path& out_dir, Policy& policy,
                   ProcessJudge& judge, const HarnessConfig& config) -> BenchmarkReport {
    const auto bundles = list_bundles(task_dir);
    std::filesystem::create_directories(out_dir / "logs");
    std::vector<CaseRow> rows(bundles.size());
    const auto n = static_cast<std::int64_t>(bundles.size());
    const int workers = static_cast<int>(std::max<std::size_t>(1, config.parallelism));
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& dir = bundles[static_cast<std::size_t>(i)];
        CaseRow row;
        try {
            const auto bundle = read_bundle(dir);
            const auto traj = run_episode(bundle.task(), policy, config.episode);
            row = score_case(traj, bundle, config.weights, judge, config.gpu_hourly_price, config.token_pricing);
            json extra{{"reward", reward_json(row)}, {"completed", row.completed}, {"cost", row.cost}};
            write_text_file(out_dir / "logs" / (bundle.task_id + ".jsonl"), trajectory_to_jsonl(traj, extra));
        } catch (const std::exception& e) {
            row = failed_case(bundle_id(dir), e.what());
        }
        rows[static_cast<std::size_t>(i)] = std::move(row);
    }
    auto report = aggregate_report(std::move(rows));
    write_text_file(out_dir / "report.json", report_to_json(report).dump(2) + "\n");
    write_text_file(out_dir / "report.txt", report_to_text(report));
    return report;
}

auto rescore_benchmark(const std::filesystem::path& task_dir, const std::filesystem::path& log_dir,
                       ProcessJudge& judge, const HarnessConfig& config) -> BenchmarkReport {
    std::vector<CaseRow> rows;
    for (const auto& dir : list_bundles(task_dir)) {
        try {
            const auto bundle = read_bundle(dir);
            const auto traj = trajectory_from_jsonl(read_text_file(log_dir / (bundle.task_id + ".jsonl")));
            rows.push_back(score_case(traj, bundle, config.weights, judge, config.gpu_hourly_price, config.token_pricing));
        } catch (const std::exception& e) {
            rows.push_back(failed_case(bundle_id(dir), e.what()));
        }
    }
    return aggregate_report(std::move(rows));
}

auto report_to_json(const BenchmarkReport& report, bool include_timing) -> json {
    json cases = json::array();
    for (const auto& r : report.rows) {
        json c{{"task_id", r.task_id}, {"status", r.status}, {"attempted", r.attempted},
               {"completed", r.completed}};
        const auto rewards = reward_json(r);
        for (const auto& [k, v] : rewards.items()) c[k] = v;
        if (include_timing) {
            c["wall_time"] = r.wall_time;
            c["cost"] = r.cost;
        }
        c["message"] = r.message;
        cases.push_back(std::move(c));
    }
    json out{{"n", report.n()}};
    if (report.n() == 0) {
        out["marker"] = "no tasks";
        out["accuracy"] = nullptr;
        out["completion"] = nullptr;
        out["mean_cost"] = nullptr;
    } else {
        out["accuracy"] = report.accuracy;
        out["completion"] = report.completion;
        if (include_timing) out["mean_cost"] = report.mean_cost;
    }
    out["cases"] = std::move(cases);
    return out;
}

auto report_to_text(const BenchmarkReport& report) -> std::string {
    if (report.n() == 0) return "no tasks\n";
    std::vector<std::vector<std::string>> table{
        {"task", "status", "r_out", "r_part", "r_llm", "total", "wall_s", "cost_usd"}};
    for (const auto& r : report.rows) {
        table.push_back({r.task_id, r.status, std::to_string(r.r_out), fixed(r.r_part, 4), fixed(r.r_llm, 4),
                         fixed(r.total, 4), fixed(r.wall_time, 3), fixed(r.cost, 6)});
    }
    std::vector<std::size_t> width(table.front().size(), 0);
    for (const auto& line : table) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }
    std::string out;
    for (const auto& line : table) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            out += line[c];
            if (c + 1 < line.size()) out += std::string(width[c] - line[c].size() + 2, ' ');
        }
        out += '\n';
    }
    out += "\nN: " + std::to_string(report.n()) + "\n";
    out += "accuracy: " + fixed(report.accuracy, 2) + "%\n";
    out += "completion: " + fixed(report.completion, 2) + "%\n";
    out += "mean cost: " + fixed(report.mean_cost, 6) + " USD\n";
    return out;
}

} // namespace adp
