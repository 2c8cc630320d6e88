#include <adp/agent.hpp>

namespace adp {

namespace {

auto path_text(const OpList& path) -> std::string {
    if (path.empty()) return "root\n";
    return serialize_pipeline(path);
}

void append_state(std::string& out, const TableSet& state, std::size_t sample_rows) {
    for (const auto& [name, table] : state) {
        out += "table " + name + ":\n";
        out += serialize_table(*table, sample_rows);
        if (out.back() != '\n') out += '\n';
    }
}

} // namespace

auto system_preamble() -> std::string {
    std::string out =
        "You build a data preparation pipeline that turns the source tables into the target table.\n"
        "Work on a tree of table states. Every reply contains one <plan>...</plan> block followed by\n"
        "exactly one <expand>...</expand> or <answer>...</answer> block.\n"
        "\n"
        "<expand> starts with a parent line, then one operator call per line:\n"
        "  parent: root\n"
        "  Deduplicate(\"movies\", [\"id\"], \"first\")\n"
        "For a deeper parent write `parent:` alone, then the parent's full operator path one call per\n"
        "line, then a line `ops:` and the new calls. A one-op path may stay on the parent line.\n"
        "\n"
        "<answer> holds the full operator path of the node holding the result, one call per line\n"
        "(empty for the sources), and optionally `target: <table name>`.\n"
        "\n"
        "The environment replies with <execute> blocks. Never write one yourself.\n"
        "Expressions use col(\"name\"), literals, arithmetic, comparisons, and/or/not and builtins:\n";
    std::string builtins;
    for (auto b : builtin_names()) builtins += (builtins.empty() ? "" : ", ") + std::string(b);
    out += "  " + builtins + "\n\nOperators:\n";
    for (const auto& sig : operator_registry()) out += "  " + describe_signature(sig) + "\n";
    return out;
}

auto render_target(const TargetSpec& target) -> std::string {
    std::string out = "target table: " + target.schema.table_name + "\n";
    if (!target.description.empty()) out += "description: " + target.description + "\n";
    out += "columns:\n";
    for (const auto& c : target.schema.columns) {
        out += "- " + c.name + " (" + std::string(kind_name(c.dtype)) + ")";
        if (c.description && !c.description->empty()) out += ": " + *c.description;
        out += "\n";
    }
    return out;
}

auto build_initial_observation(const TaskSpec& task, const EpisodeConfig& config) -> std::string {
    std::string out = render_target(task.target);
    out += "\nsource tables (root):\n";
    append_state(out, task.sources, config.sample_rows);
    out += "\nturns available: " + std::to_string(config.max_turns) + "\n";
    return out;
}

auto build_observation(const ReasoningTree& tree, const TurnRecord& record, std::size_t turns_left,
                       const EpisodeConfig& config) -> std::string {
    std::string out = "turn " + std::to_string(record.turn) + "\n";
    out += "parent:\n" + path_text(record.parent_path);
    for (const auto& created : record.created_paths) {
        const auto id = tree.resolve_parent(created);
        out += "\nnew node:\n" + path_text(created);
        append_state(out, tree.node(id).state, config.sample_rows);
    }
    if (record.created_paths.empty() && !record.failure) {
        out += "\nexisting node:\n" + path_text(record.leaf_path);
        append_state(out, tree.node(tree.resolve_parent(record.leaf_path)).state, config.sample_rows);
    }
    if (record.failure) {
        out += "\nfailed op:\n" + print_operator_call(record.failure->attempted_op) + "\n";
        out += "error: " + record.failure->error.message + "\n";
        if (!record.failure->error.detail.empty()) out += "detail: " + record.failure->error.detail + "\n";
        out += "failure recorded at node:\n" + path_text(record.leaf_path);
    }
    out += "\nturns left: " + std::to_string(turns_left) + "\n";
    if (turns_left == 0) out += "turn limit reached: reply with an <answer> block.\n";
    return out;
}

} // namespace adp
