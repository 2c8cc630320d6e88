#include <adp/tree.hpp>

#include <algorithm>

namespace adp {

ReasoningTree::ReasoningTree(TableSet sources) {
    TreeNode root;
    root.state = std::move(sources);
    nodes_.push_back(std::move(root));
}

auto ReasoningTree::find_child(NodeId parent, const OperatorInstance& op) const -> std::optional<NodeId> {
    for (auto child : nodes_[parent].children) {
        if (*nodes_[child].incoming_op == op) return child;
    }
    return std::nullopt;
}

auto ReasoningTree::resolve_parent(const OpList& prefix) const -> NodeId {
    NodeId current = root();
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        auto next = find_child(current, prefix[i]);
        if (!next) {
            std::string message = "no such path: op " + std::to_string(i + 1) + " `" +
                                  print_operator_call(prefix[i]) + "` does not match any child";
            const auto& kids = nodes_[current].children;
            if (kids.empty()) {
                message += " (node has no children)";
            } else {
                message += "; available:";
                for (auto k : kids) message += "\n  " + print_operator_call(*nodes_[k].incoming_op);
            }
            throw PathError(message, i);
        }
        current = *next;
    }
    return current;
}

auto ReasoningTree::path(NodeId id) const -> OpList {
    OpList out;
    for (NodeId cur = id; nodes_.at(cur).parent; cur = *nodes_[cur].parent) {
        out.push_back(*nodes_[cur].incoming_op);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

auto ReasoningTree::expand_and_execute(NodeId parent, const OpList& ops, std::size_t turn, const ExecContext& ctx)
    -> ExpandOutcome {
    ExpandOutcome out;
    NodeId current = nodes_.at(parent).id;
    for (const auto& op : ops) {
        if (auto existing = find_child(current, op)) {
            current = *existing;
            continue;
        }
        auto result = execute_operator(op, nodes_[current].state, ctx);
        if (!result) {
            FailureRecord record{op, result.error(), turn};
            nodes_[current].failures.push_back(record);
            out.failure = std::move(record);
            break;
        }
        TreeNode child;
        child.id = nodes_.size();
        child.state = std::move(result).value();
        child.parent = current;
        child.incoming_op = op;
        child.depth = nodes_[current].depth + 1;
        nodes_[current].children.push_back(child.id);
        current = child.id;
        out.created.push_back(child.id);
        nodes_.push_back(std::move(child));
    }
    out.leaf = current;
    return out;
}

auto ReasoningTree::snapshot() const -> nlohmann::ordered_json {
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : nodes_) {
        nlohmann::ordered_json j;
        j["id"] = n.id;
        j["parent"] = n.parent ? nlohmann::ordered_json(*n.parent) : nlohmann::ordered_json(nullptr);
        j["path"] = serialize_pipeline(path(n.id));
        auto tables = nlohmann::ordered_json::array();
        for (const auto& [name, t] : n.state) {
            tables.push_back({{"name", name}, {"rows", t->row_count()}, {"columns", t->column_names()}});
        }
        j["tables"] = std::move(tables);
        auto failures = nlohmann::ordered_json::array();
        for (const auto& f : n.failures) {
            failures.push_back({{"turn", f.turn},
                                {"op", print_operator_call(f.attempted_op)},
                                {"message", f.error.message},
                                {"detail", f.error.detail}});
        }
        j["failures"] = std::move(failures);
        nodes.push_back(std::move(j));
    }
    return {{"root", root()}, {"nodes", std::move(nodes)}};
}

auto extract_answer_path(const ReasoningTree& tree, NodeId leaf) -> OpList { return tree.path(leaf); }

} // namespace adp
