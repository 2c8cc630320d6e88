#pragma once

#include <adp/agent.hpp>

#include <optional>
#include <string>
#include <vector>

namespace adp {

struct RewardWeights {
    double alpha = 1.0;
    double beta = 0.5;
    double gamma = 0.2;
};

struct PartialScores {
    double s_sch = 0.0;
    double s_shp = 0.0;
    double s_cnt = 0.0;
    double r_part = 0.0;
};

struct RewardBreakdown {
    int r_out = 0;
    double s_sch = 0.0;
    double s_shp = 0.0;
    double s_cnt = 0.0;
    double r_part = 0.0;
    double r_llm = 0.0;
    double total = 0.0;
};

/// 1 iff the tables match up to row and column order.
auto outcome_reward(const Table& produced, const Table& target) -> int;

/// Jaccard similarity of the column-name sets.
auto schema_similarity(const Table& produced, const Table& target) -> double;
/// exp(-|(n - n*) / n*|); when n* = 0 it is 1 for n = 0 and 0 otherwise.
auto shape_similarity(std::size_t produced_rows, std::size_t target_rows) -> double;
/// Positional cell agreement over shared columns after canonical row ordering.
auto content_similarity(const Table& produced, const Table& target) -> double;
/// All three similarities and their mean; r_part is 1 outright when the tables match exactly.
auto partial_reward(const Table& produced, const Table& target) -> PartialScores;

auto hybrid_reward(int r_out, const PartialScores& partial, double r_llm, const RewardWeights& w = {})
    -> RewardBreakdown;

struct JudgeScores {
    double consistency = 1.0;
    double responsiveness = 1.0;
    double justification = 1.0;
    std::size_t consistency_events = 0;
    std::size_t responsiveness_events = 0;
    std::size_t justification_events = 0;

    [[nodiscard]] auto score() const -> double { return (consistency + responsiveness + justification) / 3.0; }
};

class ProcessJudge {
public:
    virtual ~ProcessJudge() = default;
    virtual auto score(const Trajectory& t) -> double = 0;
};

/// Scores plan-action consistency, feedback responsiveness and backtracking justification from
/// the trajectory alone. Criteria without applicable events score 1.
class RuleJudge final : public ProcessJudge {
public:
    auto score(const Trajectory& t) -> double override { return judge(t).score(); }
    static auto judge(const Trajectory& t) -> JudgeScores;
};

/// Asks a chat endpoint for a score in [0, 1].
class ChatJudge final : public ProcessJudge {
public:
    explicit ChatJudge(ChatConfig config) : policy_(std::move(config)) {}
    auto score(const Trajectory& t) -> double override;

    static auto prompt(const Trajectory& t) -> std::string;
    /// The first number in the reply, clamped to [0, 1].
    static auto parse_score(std::string_view reply) -> double;

private:
    ChatPolicy policy_;
};

/// Whether `name` occurs in `text` as a case-insensitive word.
auto mentions_name(std::string_view text, std::string_view name) -> bool;

} // namespace adp
