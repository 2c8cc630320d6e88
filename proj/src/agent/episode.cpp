#include <adp/agent.hpp>
#include <adp/table_io.hpp>

namespace adp {

namespace {

auto execute_block(const std::string& body) -> std::string { return "<execute>\n" + body + "</execute>"; }

auto protocol_feedback(const ProtocolError& e) -> std::string {
    return "protocol error (" + e.category() + "): " + e.what() +
           "\nReply with one <plan> block and exactly one <expand> or <answer> block.\n";
}

} // namespace

auto status_name(EpisodeStatus s) -> std::string_view {
    switch (s) {
    case EpisodeStatus::Answered: return "answered";
    case EpisodeStatus::TurnLimit: return "turn_limit";
    case EpisodeStatus::ProtocolError: return "protocol_error";
    case EpisodeStatus::EmptyResult: return "empty_result";
    }
    return "unknown";
}

auto parse_status(std::string_view s) -> EpisodeStatus {
    if (s == "answered") return EpisodeStatus::Answered;
    if (s == "turn_limit") return EpisodeStatus::TurnLimit;
    if (s == "protocol_error") return EpisodeStatus::ProtocolError;
    if (s == "empty_result") return EpisodeStatus::EmptyResult;
    throw Error("unknown episode status '" + std::string(s) + "'");
}

Episode::Episode(TaskSpec task, EpisodeConfig config)
    : task_(std::move(task)), config_(std::move(config)), tree_(task_.sources) {
    if (config_.max_turns < 1) throw Error("max_turns must be at least 1");
}

auto Episode::run(PolicySession& session) -> Trajectory {
    const auto started = std::chrono::steady_clock::now();
    Trajectory traj;
    traj.task_id = task_.task_id;

    const std::vector<Message> head{{"system", system_preamble()},
                                    {"user", build_initial_observation(task_, config_)}};
    std::vector<Message> exchanges;
    auto conversation = [&] {
        std::vector<Message> out = head;
        std::size_t from = 0;
        if (config_.history_window > 0 && exchanges.size() > 2 * config_.history_window) {
            from = exchanges.size() - 2 * config_.history_window;
        }
        out.insert(out.end(), exchanges.begin() + static_cast<std::ptrdiff_t>(from), exchanges.end());
        return out;
    };

    std::size_t turns = 0;
    std::size_t consecutive_failures = 0;
    auto protocol_failure = [&](const ProtocolError& e, const std::string& reply) -> bool {
        traj.protocol_errors.push_back({turns, e.category(), e.what(), reply});
        exchanges.push_back({"assistant", reply});
        exchanges.push_back({"user", protocol_feedback(e)});
        if (++consecutive_failures >= config_.protocol_retry_budget) {
            traj.status = EpisodeStatus::ProtocolError;
            traj.status_message = std::string(e.category()) + ": " + e.what();
            return true;
        }
        return false;
    };

    while (true) {
        const bool final_phase = turns >= config_.max_turns;
        std::string reply;
        try {
            reply = session.reply(conversation());
        } catch (const std::exception& e) {
            traj.protocol_errors.push_back({turns, "transport", e.what(), ""});
            traj.status = EpisodeStatus::ProtocolError;
            traj.status_message = std::string("transport: ") + e.what();
            break;
        }

        ParsedReply parsed;
        try {
            parsed = parse_actions(reply);
        } catch (const ProtocolError& e) {
            if (protocol_failure(e, reply)) break;
            continue;
        }

        if (auto* expand = std::get_if<ExpandAction>(&parsed.decision)) {
            if (final_phase) {
                traj.status = EpisodeStatus::TurnLimit;
                traj.status_message = "turn limit of " + std::to_string(config_.max_turns) + " reached";
                break;
            }
            NodeId parent = 0;
            try {
                parent = tree_.resolve_parent(expand->parent_prefix);
            } catch (const PathError& e) {
                if (protocol_failure(ProtocolError("bad_parent", e.what()), reply)) break;
                continue;
            }
            consecutive_failures = 0;
            ++turns;
            auto outcome = tree_.expand_and_execute(parent, expand->ops, turns, config_.exec);
            TurnRecord record;
            record.turn = turns;
            record.plan = parsed.plan;
            record.expand = *expand;
            record.parent_path = tree_.path(parent);
            record.leaf_path = tree_.path(outcome.leaf);
            for (auto id : outcome.created) record.created_paths.push_back(tree_.path(id));
            record.failure = outcome.failure;
            record.execute_feedback = build_observation(tree_, record, config_.max_turns - turns, config_);
            exchanges.push_back({"assistant", reply});
            exchanges.push_back({"user", execute_block(record.execute_feedback)});
            traj.turns.push_back(std::move(record));
            continue;
        }

        const auto& answer = std::get<AnswerAction>(parsed.decision);
        NodeId leaf = 0;
        try {
            leaf = tree_.resolve_parent(answer.path);
        } catch (const PathError& e) {
            if (protocol_failure(ProtocolError("bad_answer", e.what()), reply)) break;
            continue;
        }
        auto target = answer.target_name ? answer.target_name : task_.target_name;
        const auto& state = tree_.node(leaf).state;
        if (!target && state.contains(task_.target.schema.table_name)) target = task_.target.schema.table_name;
        try {
            traj.final_table = pick_table(state, target);
        } catch (const Error& e) {
            if (protocol_failure(ProtocolError("bad_answer", e.what()), reply)) break;
            continue;
        }
        traj.answer = answer;
        traj.answer_plan = parsed.plan;
        if (traj.final_table->row_count() == 0) {
            traj.status = EpisodeStatus::EmptyResult;
            traj.status_message = "answered table has no rows";
        } else {
            traj.status = EpisodeStatus::Answered;
            traj.status_message = "answered";
        }
        break;
    }

    traj.tree_size = tree_.size();
    traj.usage = session.usage();
    traj.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return traj;
}

auto run_episode(const TaskSpec& task, Policy& policy, const EpisodeConfig& config) -> Trajectory {
    auto session = policy.start(task);
    Episode episode(task, config);
    return episode.run(*session);
}

} // namespace adp
