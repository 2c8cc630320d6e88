#include "random_policy.hpp"

#include <functional>

namespace adp::testing {

namespace {

auto quoted(const std::string& s) -> std::string { return "\"" + s + "\""; }

auto dsl_col(const std::string& c) -> std::string { return "col(\\\"" + c + "\\\")"; }

class RandomSession final : public PolicySession {
public:
    RandomSession(std::uint64_t seed, TableSet sources) : rng_(seed), sources_(std::move(sources)) {}

    auto reply(const std::vector<Message>&) -> std::string override {
        const auto roll = pick(rng_, 100);
        if (roll < 4) return "I am not sure what to do next.";
        if (roll < 7) return "<expand>\nparent: root\n" + random_call(rng_, sources_) + "\n</expand>";
        if (roll < 9) return "<plan>x</plan><execute>made up</execute><expand>parent: root\nCount(\"a\")</expand>";
        const auto& parent = pick_from(rng_, known_);
        if (roll < 22) {
            std::string body = parent;
            if (chance(rng_, 0.3)) body += "target: " + pick_from(rng_, sources_.names()) + "\n";
            return "<plan>answer with the current branch</plan>\n<answer>\n" + body + "</answer>";
        }
        std::string plan = "<plan>work on";
        for (const auto& n : sources_.names()) plan += " " + n;
        plan += "</plan>\n";
        std::string body = parent.empty() ? std::string("parent: root\n") : "parent:\n" + parent + "ops:\n";
        std::string chain = parent;
        const auto n = 1 + pick(rng_, 3);
        for (std::size_t i = 0; i < n; ++i) {
            const auto line = random_call(rng_, sources_) + "\n";
            body += line;
            chain += line;
            known_.push_back(chain);
        }
        return plan + "<expand>\n" + body + "</expand>";
    }

private:
    Rng rng_;
    TableSet sources_;
    std::vector<std::string> known_{""};
};

} // namespace

auto random_call(Rng& rng, const TableSet& state) -> std::string {
    const auto names = state.names();
    if (names.empty() || chance(rng, 0.05)) return "Count(\"nosuch\")";
    const auto& tname = pick_from(rng, names);
    const auto table = state.find(tname);
    const auto cols = table->column_names();
    const auto c = chance(rng, 0.08) ? std::string("zz") : pick_from(rng, cols);
    const auto t = quoted(tname);
    switch (pick(rng, 12)) {
    case 0: return "Deduplicate(" + t + ", " + (chance(rng, 0.5) ? "null" : "[" + quoted(c) + "]") + ", " +
                   (chance(rng, 0.5) ? "\"first\"" : "\"last\"") + ")";
    case 1: return "DropNA(" + t + ", [" + quoted(c) + "], " + (chance(rng, 0.5) ? "\"any\"" : "\"all\"") + ")";
    case 2: return "TopK(" + t + ", " + std::to_string(pick(rng, 5)) + ")";
    case 3: return "Sort(" + t + ", [" + quoted(c) + "], " + (chance(rng, 0.5) ? "true" : "false") + ")";
    case 4: return "Filter(" + t + ", \"" + (chance(rng, 0.5) ? "not " : "") + "is_null(" + dsl_col(c) + ")\")";
    case 5: return "SelectColumn(" + t + ", [" + quoted(c) + "])";
    case 6: return "RenameColumn(" + t + ", {" + quoted(c) + ": " + quoted(c + "_r") + "})";
    case 7: return "AddNewColumn(" + t + ", \"flag\", \"is_null(" + dsl_col(c) + ")\")";
    case 8: return "Count(" + t + ")";
    case 9: return "Transpose(" + t + ")";
    case 10: return "Union([" + t + ", " + t + "], \"distinct\")";
    default: return "Filter(" + t + ", \"" + dsl_col("zz") + "\")";
    }
}

auto RandomPolicy::start(const TaskSpec& task) -> std::unique_ptr<PolicySession> {
    return std::make_unique<RandomSession>(seed_ ^ std::hash<std::string>{}(task.task_id), task.sources);
}

auto random_task(Rng& rng, const std::string& task_id) -> TaskSpec {
    TaskSpec task;
    task.task_id = task_id;
    const std::vector<std::string> names{"a", "b", "c"};
    const auto n = 1 + pick(rng, 3);
    for (std::size_t i = 0; i < n; ++i) task.sources.put(random_table(rng, names[i]));
    const auto first = task.sources.find("a");
    task.target.schema = first->schema();
    task.target.description = "a cleaned copy of a";
    return task;
}

} // namespace adp::testing
