#include <adp/agent.hpp>
#include <adp/table_io.hpp>

namespace adp {

namespace {

using json = nlohmann::ordered_json;

auto failure_to_json(const std::optional<FailureRecord>& f) -> json {
    if (!f) return nullptr;
    return {{"turn", f->turn},
            {"op", print_operator_call(f->attempted_op)},
            {"message", f->error.message},
            {"detail", f->error.detail}};
}

auto failure_from_json(const json& j) -> std::optional<FailureRecord> {
    if (j.is_null()) return std::nullopt;
    auto op = parse_operator_call(j.at("op").get<std::string>());
    return FailureRecord{op, ExecError{op, j.at("message").get<std::string>(), j.at("detail").get<std::string>()},
                         j.at("turn").get<std::size_t>()};
}

auto turn_to_json(const TurnRecord& r) -> json {
    json created = json::array();
    for (const auto& p : r.created_paths) created.push_back(serialize_pipeline(p));
    return {{"type", "turn"},
            {"turn", r.turn},
            {"plan", r.plan},
            {"parent", serialize_pipeline(r.expand.parent_prefix)},
            {"ops", serialize_pipeline(r.expand.ops)},
            {"parent_path", serialize_pipeline(r.parent_path)},
            {"leaf_path", serialize_pipeline(r.leaf_path)},
            {"created", std::move(created)},
            {"failure", failure_to_json(r.failure)},
            {"execute", r.execute_feedback}};
}

auto turn_from_json(const json& j) -> TurnRecord {
    TurnRecord r;
    r.turn = j.at("turn").get<std::size_t>();
    r.plan = j.at("plan").get<std::string>();
    r.expand.parent_prefix = parse_pipeline(j.at("parent").get<std::string>());
    r.expand.ops = parse_pipeline(j.at("ops").get<std::string>());
    r.parent_path = parse_pipeline(j.at("parent_path").get<std::string>());
    r.leaf_path = parse_pipeline(j.at("leaf_path").get<std::string>());
    for (const auto& c : j.at("created")) r.created_paths.push_back(parse_pipeline(c.get<std::string>()));
    r.failure = failure_from_json(j.at("failure"));
    r.execute_feedback = j.at("execute").get<std::string>();
    return r;
}

} // namespace

auto trajectory_to_jsonl(const Trajectory& t, const nlohmann::ordered_json& summary_extra, bool include_wall_time)
    -> std::string {
    std::string out;
    auto emit = [&](const json& j) {
        out += j.dump();
        out += '\n';
    };
    auto emit_errors_after = [&](std::size_t turn) {
        for (const auto& e : t.protocol_errors) {
            if (e.after_turn != turn) continue;
            emit({{"type", "protocol_error"},
                  {"after_turn", e.after_turn},
                  {"category", e.category},
                  {"message", e.message},
                  {"reply", e.reply}});
        }
    };
    emit_errors_after(0);
    for (const auto& r : t.turns) {
        emit(turn_to_json(r));
        emit_errors_after(r.turn);
    }
    json summary{{"type", "summary"},
                 {"task_id", t.task_id},
                 {"status", status_name(t.status)},
                 {"message", t.status_message},
                 {"turns", t.turns.size()},
                 {"protocol_errors", t.protocol_errors.size()},
                 {"tree_size", t.tree_size}};
    if (t.answer) {
        summary["answer"] = {{"plan", t.answer_plan},
                             {"path", serialize_pipeline(t.answer->path)},
                             {"target", t.answer->target_name ? json(*t.answer->target_name) : json(nullptr)}};
    } else {
        summary["answer"] = nullptr;
    }
    summary["final_table"] = t.final_table ? table_to_json(*t.final_table) : json(nullptr);
    if (summary_extra.is_object()) {
        for (const auto& [k, v] : summary_extra.items()) summary[k] = v;
    }
    if (t.usage) {
        summary["usage"] = {{"input", t.usage->input}, {"output", t.usage->output}, {"cached_input", t.usage->cached_input}};
    }
    if (include_wall_time) summary["wall_time"] = t.wall_time;
    emit(summary);
    return out;
}

auto trajectory_from_jsonl(std::string_view text) -> Trajectory {
    Trajectory t;
    bool have_summary = false;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const auto j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError("trajectory line " + std::to_string(line_no) + " is not JSON", line_no);
        const auto type = j.value("type", "");
        if (type == "turn") {
            t.turns.push_back(turn_from_json(j));
        } else if (type == "protocol_error") {
            t.protocol_errors.push_back({j.at("after_turn").get<std::size_t>(), j.at("category").get<std::string>(),
                                         j.at("message").get<std::string>(), j.at("reply").get<std::string>()});
        } else if (type == "summary") {
            have_summary = true;
            t.task_id = j.at("task_id").get<std::string>();
            t.status = parse_status(j.at("status").get<std::string>());
            t.status_message = j.value("message", "");
            t.tree_size = j.value("tree_size", std::size_t{1});
            if (const auto& a = j.at("answer"); !a.is_null()) {
                AnswerAction answer;
                answer.path = parse_pipeline(a.at("path").get<std::string>());
                if (!a.at("target").is_null()) answer.target_name = a.at("target").get<std::string>();
                t.answer = std::move(answer);
                t.answer_plan = a.value("plan", "");
            }
            if (const auto& ft = j.at("final_table"); !ft.is_null()) t.final_table = table_from_json(ft);
            t.wall_time = j.value("wall_time", 0.0);
            if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
                t.usage = TokenUsage{u->value("input", std::size_t{0}), u->value("output", std::size_t{0}),
                                     u->value("cached_input", std::size_t{0})};
            }
        } else {
            throw ParseError("trajectory line " + std::to_string(line_no) + " has unknown type", line_no);
        }
    }
    if (!have_summary) throw ParseError("trajectory log has no summary record", line_no);
    return t;
}

} // namespace adp
