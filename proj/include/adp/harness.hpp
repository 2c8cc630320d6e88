#pragma once

#include <adp/reward.hpp>
#include <adp/synthesis.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace adp {

/// USD per million tokens.
struct TokenPricing {
    double input = 0.0;
    double output = 0.0;
    double cached_input = 0.0;
};

struct HarnessConfig {
    EpisodeConfig episode;
    RewardWeights weights;
    double gpu_hourly_price = 0.91;
    /// When set, cases whose policy reported token usage are costed per token instead of by time.
    std::optional<TokenPricing> token_pricing;
    std::size_t parallelism = 1;
    std::uint64_t seed = 0;
};

struct CaseRow {
    std::string task_id;
    std::string status;
    bool attempted = true;
    bool completed = false;
    int r_out = 0;
    double s_sch = 0.0;
    double s_shp = 0.0;
    double s_cnt = 0.0;
    double r_part = 0.0;
    double r_llm = 0.0;
    double total = 0.0;
    double wall_time = 0.0;
    double cost = 0.0;
    std::string message;
};

struct BenchmarkReport {
    std::vector<CaseRow> rows;
    double accuracy = 0.0;
    double completion = 0.0;
    double mean_cost = 0.0;

    [[nodiscard]] auto n() const -> std::size_t { return rows.size(); }
    [[nodiscard]] auto all_attempted() const -> bool;
};

/// price * wall_time / 3600.
auto case_cost(double wall_time_seconds, double hourly_price) -> double;
auto token_cost(const TokenUsage& usage, const TokenPricing& pricing) -> double;

auto score_case(const Trajectory& traj, const TaskBundle& bundle, const RewardWeights& weights, ProcessJudge& judge,
                double hourly_price, const std::optional<TokenPricing>& pricing = std::nullopt) -> CaseRow;

/// Row for a bundle that could not be loaded.
auto failed_case(const std::string& task_id, const std::string& message) -> CaseRow;

/// Accuracy and completion are percentages over all rows; all zero when there are none.
auto aggregate_report(std::vector<CaseRow> rows) -> BenchmarkReport;

/// Subdirectories of `task_dir` in name order.
auto list_bundles(const std::filesystem::path& task_dir) -> std::vector<std::filesystem::path>;

/// Runs every bundle, writing `<out>/logs/<task>.jsonl`, `<out>/report.json` and `<out>/report.txt`.
auto run_benchmark(const std::filesystem::path& task_dir, const std::filesystem::path& out_dir, Policy& policy,
                   ProcessJudge& judge, const HarnessConfig& config) -> BenchmarkReport;

/// Recomputes the report from stored logs.
auto rescore_benchmark(const std::filesystem::path& task_dir, const std::filesystem::path& log_dir,
                       ProcessJudge& judge, const HarnessConfig& config) -> BenchmarkReport;

auto reward_json(const CaseRow& row) -> nlohmann::ordered_json;
auto report_to_json(const BenchmarkReport& report, bool include_timing = true) -> nlohmann::ordered_json;
auto report_to_text(const BenchmarkReport& report) -> std::string;

} // namespace adp
