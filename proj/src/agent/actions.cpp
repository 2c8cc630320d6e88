#include <adp/agent.hpp>

namespace adp {

namespace {

struct Block {
    std::string_view body;
};

auto trim(std::string_view s) -> std::string_view {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

auto lines_of(std::string_view body) -> std::vector<std::string_view> {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const auto end = std::min(body.find('\n', pos), body.size());
        if (auto line = trim(body.substr(pos, end - pos)); !line.empty()) out.push_back(line);
        pos = end + 1;
    }
    return out;
}

auto blocks(std::string_view text, std::string_view tag, const std::string& unclosed_category)
    -> std::vector<Block> {
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    std::vector<Block> out;
    std::size_t pos = 0;
    while ((pos = text.find(open, pos)) != std::string_view::npos) {
        const auto start = pos + open.size();
        const auto end = text.find(close, start);
        if (end == std::string_view::npos) {
            throw ProtocolError(unclosed_category, "unclosed <" + std::string(tag) + "> tag");
        }
        const auto nested = text.find(open, start);
        if (nested != std::string_view::npos && nested < end) {
            throw ProtocolError(unclosed_category, "unclosed <" + std::string(tag) + "> tag");
        }
        out.push_back({text.substr(start, end - start)});
        pos = end + close.size();
    }
    return out;
}

auto parse_op_line(std::string_view line, const std::string& category, const std::string& what) -> OperatorInstance {
    try {
        return parse_operator_call(line);
    } catch (const ParseError& e) {
        throw ProtocolError(category, what + " `" + std::string(line) + "`: " + e.what());
    }
}

auto parse_expand(std::string_view body) -> ExpandAction {
    const auto lines = lines_of(body);
    if (lines.empty() || lines.front().substr(0, 7) != "parent:") {
        throw ProtocolError("bad_parent", "expand block must start with a `parent:` line");
    }
    ExpandAction out;
    std::size_t i = 1;
    const auto head = trim(lines.front().substr(7));
    if (head == "root") {
        if (i < lines.size() && lines[i] == "ops:") ++i;
    } else if (!head.empty()) {
        out.parent_prefix.push_back(parse_op_line(head, "bad_parent", "cannot parse parent op"));
        if (i < lines.size() && lines[i] == "ops:") ++i;
    } else {
        bool found_ops = false;
        for (; i < lines.size(); ++i) {
            if (lines[i] == "ops:") {
                found_ops = true;
                ++i;
                break;
            }
            if (lines[i] == "root") continue;
            out.parent_prefix.push_back(parse_op_line(lines[i], "bad_parent", "cannot parse parent op"));
        }
        if (!found_ops) throw ProtocolError("bad_parent", "multi-line parent must be followed by an `ops:` line");
    }
    for (; i < lines.size(); ++i) out.ops.push_back(parse_op_line(lines[i], "bad_ops", "cannot parse op"));
    if (out.ops.empty()) throw ProtocolError("bad_ops", "expand block has no operators");
    return out;
}

auto parse_answer(std::string_view body) -> AnswerAction {
    AnswerAction out;
    for (auto line : lines_of(body)) {
        if (line.substr(0, 7) == "target:") {
            if (out.target_name) throw ProtocolError("bad_ops", "answer block has more than one `target:` line");
            const auto name = trim(line.substr(7));
            if (name.empty()) throw ProtocolError("bad_ops", "empty `target:` line");
            out.target_name = std::string(name);
            continue;
        }
        if (line == "root") continue;
        out.path.push_back(parse_op_line(line, "bad_ops", "cannot parse answer op"));
    }
    return out;
}

} // namespace

auto parse_actions(std::string_view text) -> ParsedReply {
    if (text.find("<execute>") != std::string_view::npos || text.find("</execute>") != std::string_view::npos) {
        throw ProtocolError("stray_execute", "execute blocks are written by the environment, not the policy");
    }
    const auto plans = blocks(text, "plan", "missing_plan");
    const auto expands = blocks(text, "expand", "bad_ops");
    const auto answers = blocks(text, "answer", "bad_ops");
    if (plans.empty()) throw ProtocolError("missing_plan", "reply has no <plan> block");
    if (plans.size() > 1) throw ProtocolError("missing_plan", "reply has more than one <plan> block");
    if (trim(plans.front().body).empty()) throw ProtocolError("missing_plan", "plan block is empty");
    const auto decisions = expands.size() + answers.size();
    if (decisions != 1) {
        throw ProtocolError("multiple_decisions", "expected exactly one <expand> or <answer> block, found " +
                                                      std::to_string(decisions));
    }
    ParsedReply out{std::string(trim(plans.front().body)), ExpandAction{}};
    if (!expands.empty()) {
        out.decision = parse_expand(expands.front().body);
    } else {
        out.decision = parse_answer(answers.front().body);
    }
    return out;
}

} // namespace adp
