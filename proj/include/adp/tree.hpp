#pragma once

#include <adp/pipeline.hpp>

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace adp {

using NodeId = std::size_t;

struct FailureRecord {
    OperatorInstance attempted_op;
    ExecError error;
    std::size_t turn = 0;
};

struct TreeNode {
    NodeId id = 0;
    TableSet state;
    std::optional<NodeId> parent;
    std::optional<OperatorInstance> incoming_op;
    std::vector<FailureRecord> failures;
    std::vector<NodeId> children;
    std::size_t depth = 0;
};

/// A prefix that does not name an existing node. `index` is the position of the first unmatched op.
class PathError : public Error {
public:
    PathError(const std::string& message, std::size_t index) : Error(message), index_(index) {}
    [[nodiscard]] auto index() const -> std::size_t { return index_; }

private:
    std::size_t index_;
};

struct ExpandOutcome {
    /// Nodes added by this expansion, in chain order.
    std::vector<NodeId> created;
    /// Deepest node reached: the last successful op's node, or the parent.
    NodeId leaf = 0;
    std::optional<FailureRecord> failure;
};

/// Search tree over materialized table sets. Nodes are addressed by their root path.
class ReasoningTree {
public:
    explicit ReasoningTree(TableSet sources);

    [[nodiscard]] auto root() const -> NodeId { return 0; }
    [[nodiscard]] auto node(NodeId id) const -> const TreeNode& { return nodes_.at(id); }
    [[nodiscard]] auto size() const -> std::size_t { return nodes_.size(); }
    [[nodiscard]] auto nodes() const -> const std::vector<TreeNode>& { return nodes_; }

    /// Walks from the root matching each op structurally. Throws PathError.
    [[nodiscard]] auto resolve_parent(const OpList& prefix) const -> NodeId;
    /// Root-to-node operator path.
    [[nodiscard]] auto path(NodeId id) const -> OpList;

    /// Applies `ops` as a chain from `parent`. Successful ops add nodes (an op equal to an existing
    /// child's edge reuses that child); the first failure stops the chain and is recorded on the
    /// deepest node reached.
    auto expand_and_execute(NodeId parent, const OpList& ops, std::size_t turn, const ExecContext& ctx = {})
        -> ExpandOutcome;

    [[nodiscard]] auto snapshot() const -> nlohmann::ordered_json;

private:
    [[nodiscard]] auto find_child(NodeId parent, const OperatorInstance& op) const -> std::optional<NodeId>;

    std::vector<TreeNode> nodes_;
};

auto extract_answer_path(const ReasoningTree& tree, NodeId leaf) -> OpList;

} // namespace adp
