#pragma once

#include <adp/tree.hpp>

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace adp {

struct ExpandAction {
    OpList parent_prefix;
    OpList ops;
};

struct AnswerAction {
    OpList path;
    std::optional<std::string> target_name;
};

struct ParsedReply {
    std::string plan;
    std::variant<ExpandAction, AnswerAction> decision;

    [[nodiscard]] auto is_answer() const -> bool { return decision.index() == 1; }
};

/// Categories: missing_plan, multiple_decisions, bad_parent, bad_ops, stray_execute.
/// The episode driver adds bad_answer and transport.
class ProtocolError : public Error {
public:
    ProtocolError(std::string category, const std::string& message)
        : Error(message), category_(std::move(category)) {}
    [[nodiscard]] auto category() const -> const std::string& { return category_; }

private:
    std::string category_;
};

/// Extracts one <plan> block and exactly one <expand> or <answer> block. Throws ProtocolError.
auto parse_actions(std::string_view text) -> ParsedReply;

struct TargetSpec {
    Schema schema;
    std::string description;
};

struct TaskSpec {
    std::string task_id;
    TableSet sources;
    TargetSpec target;
    std::optional<std::string> target_name;
};

struct Message {
    std::string role;
    std::string content;
};

/// Raised by policies when a reply cannot be obtained at all.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Tokens billed by a remote endpoint over a session. `input` excludes cached prompt tokens.
struct TokenUsage {
    std::size_t input = 0;
    std::size_t output = 0;
    std::size_t cached_input = 0;

    friend auto operator==(const TokenUsage&, const TokenUsage&) -> bool = default;
};

/// One conversation with a policy. Sessions are owned by a single episode.
class PolicySession {
public:
    virtual ~PolicySession() = default;
    virtual auto reply(const std::vector<Message>& conversation) -> std::string = 0;
    /// Accumulated token counts, for sessions that report them.
    [[nodiscard]] virtual auto usage() const -> std::optional<TokenUsage> { return std::nullopt; }
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual auto start(const TaskSpec& task) -> std::unique_ptr<PolicySession> = 0;
};

/// Replays canned replies in order. A file holds either a JSON array of replies (used for every
/// task) or an object mapping task ids to arrays.
class ScriptedPolicy final : public Policy {
public:
    explicit ScriptedPolicy(std::vector<std::string> replies);
    explicit ScriptedPolicy(std::map<std::string, std::vector<std::string>> by_task);
    static auto from_file(const std::filesystem::path& path) -> ScriptedPolicy;

    auto start(const TaskSpec& task) -> std::unique_ptr<PolicySession> override;

private:
    std::vector<std::string> shared_;
    std::map<std::string, std::vector<std::string>> by_task_;
};

/// Baseline: answers immediately with the empty pipeline, targeting the source table whose
/// columns best match the target schema.
class IdentityPolicy final : public Policy {
public:
    auto start(const TaskSpec& task) -> std::unique_ptr<PolicySession> override;
};

struct ChatConfig {
    std::string url = "http://127.0.0.1:8000/v1/chat/completions";
    std::string model = "default";
    double temperature = 0.01;
    std::string api_key;
    std::chrono::seconds timeout{120};
};

/// POSTs {model, temperature, messages:[{role, content}]} and reads either {content} or
/// {choices:[{message:{content}}]}. Plain http only.
class ChatPolicy final : public Policy {
public:
    explicit ChatPolicy(ChatConfig config);
    auto start(const TaskSpec& task) -> std::unique_ptr<PolicySession> override;

    static auto encode_request(const ChatConfig& config, const std::vector<Message>& conversation)
        -> nlohmann::ordered_json;
    static auto decode_response(std::string_view body) -> std::string;
    /// Reads {usage: {prompt_tokens, completion_tokens, prompt_tokens_details: {cached_tokens}}}.
    static auto decode_usage(std::string_view body) -> std::optional<TokenUsage>;

private:
    ChatConfig config_;
};

struct EpisodeConfig {
    std::size_t max_turns = 5;
    std::size_t sample_rows = 5;
    /// Consecutive unusable replies tolerated before the episode aborts.
    std::size_t protocol_retry_budget = 2;
    /// Number of most recent exchanges kept in the conversation; 0 keeps everything.
    std::size_t history_window = 0;
    ExecContext exec;
};

struct TurnRecord {
    std::size_t turn = 0;
    std::string plan;
    ExpandAction expand;
    OpList parent_path;
    OpList leaf_path;
    std::string execute_feedback;
    std::vector<OpList> created_paths;
    std::optional<FailureRecord> failure;
};

struct ProtocolErrorRecord {
    std::size_t after_turn = 0;
    std::string category;
    std::string message;
    std::string reply;
};

enum class EpisodeStatus { Answered, TurnLimit, ProtocolError, EmptyResult };

auto status_name(EpisodeStatus s) -> std::string_view;
auto parse_status(std::string_view s) -> EpisodeStatus;

struct Trajectory {
    std::string task_id;
    std::vector<TurnRecord> turns;
    std::vector<ProtocolErrorRecord> protocol_errors;
    std::optional<AnswerAction> answer;
    std::string answer_plan;
    EpisodeStatus status = EpisodeStatus::TurnLimit;
    std::string status_message;
    std::optional<Table> final_table;
    std::size_t tree_size = 1;
    double wall_time = 0.0;
    std::optional<TokenUsage> usage;
};

auto system_preamble() -> std::string;
auto render_target(const TargetSpec& target) -> std::string;
auto build_initial_observation(const TaskSpec& task, const EpisodeConfig& config) -> std::string;
/// Body of the <execute> block reported after an expansion.
auto build_observation(const ReasoningTree& tree, const TurnRecord& record, std::size_t turns_left,
                       const EpisodeConfig& config) -> std::string;

/// Drives plan/expand/execute cycles until an answer, the turn limit or a protocol failure.
class Episode {
public:
    Episode(TaskSpec task, EpisodeConfig config);

    auto run(PolicySession& session) -> Trajectory;
    [[nodiscard]] auto tree() const -> const ReasoningTree& { return tree_; }

private:
    TaskSpec task_;
    EpisodeConfig config_;
    ReasoningTree tree_;
};

auto run_episode(const TaskSpec& task, Policy& policy, const EpisodeConfig& config = {}) -> Trajectory;

/// JSON-lines log: one record per turn and per protocol error (in order), then a summary record.
/// `summary_extra` fields are merged into the summary.
auto trajectory_to_jsonl(const Trajectory& t, const nlohmann::ordered_json& summary_extra = {},
                         bool include_wall_time = true) -> std::string;
auto trajectory_from_jsonl(std::string_view text) -> Trajectory;

} // namespace adp
