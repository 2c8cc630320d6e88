#include <adp/pipeline.hpp>

#include <sstream>

namespace adp {

auto run_pipeline(const Pipeline& p, const ExecContext& ctx) -> ExecutionTrace {
    ExecutionTrace trace;
    trace.states.push_back(p.sources);
    for (std::size_t i = 0; i < p.ops.size(); ++i) {
        auto result = execute_operator(p.ops[i], trace.states.back(), ctx);
        if (!result) {
            trace.failure = PipelineFailure{i, result.error()};
            break;
        }
        trace.states.push_back(std::move(result).value());
    }
    return trace;
}

auto pick_table(const TableSet& state, const std::optional<std::string>& target_name) -> Table {
    if (target_name) {
        auto t = state.find(*target_name);
        if (!t) throw Error("no table named '" + *target_name + "' in the final state");
        return *t;
    }
    if (state.size() != 1) {
        std::string names;
        for (const auto& n : state.names()) names += (names.empty() ? "" : ", ") + n;
        throw Error("ambiguous final state: " + std::to_string(state.size()) + " tables (" + names +
                    ") and no target name");
    }
    return *state.begin()->second;
}

auto final_table(const ExecutionTrace& trace, const std::optional<std::string>& target_name) -> Table {
    if (trace.failure) throw Error("pipeline failed at op " + std::to_string(trace.failure->index));
    return pick_table(trace.last(), target_name);
}

auto serialize_pipeline(const OpList& ops) -> std::string {
    std::string out;
    for (const auto& op : ops) {
        out += print_operator_call(op);
        out += '\n';
    }
    return out;
}

auto parse_pipeline(std::string_view text) -> OpList {
    OpList ops;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        try {
            ops.push_back(parse_operator_call(line));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        if (end == text.size()) break;
    }
    return ops;
}

} // namespace adp
