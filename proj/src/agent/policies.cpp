#include <adp/agent.hpp>
#include <adp/table_io.hpp>

#include <set>

namespace adp {

namespace {

class ScriptedSession final : public PolicySession {
public:
    explicit ScriptedSession(std::vector<std::string> replies) : replies_(std::move(replies)) {}

    auto reply(const std::vector<Message>&) -> std::string override {
        if (next_ >= replies_.size()) throw TransportError("scripted replies exhausted");
        return replies_[next_++];
    }

private:
    std::vector<std::string> replies_;
    std::size_t next_ = 0;
};

class FixedSession final : public PolicySession {
public:
    explicit FixedSession(std::string text) : text_(std::move(text)) {}
    auto reply(const std::vector<Message>&) -> std::string override { return text_; }

private:
    std::string text_;
};

} // namespace

ScriptedPolicy::ScriptedPolicy(std::vector<std::string> replies) : shared_(std::move(replies)) {}

ScriptedPolicy::ScriptedPolicy(std::map<std::string, std::vector<std::string>> by_task)
    : by_task_(std::move(by_task)) {}

auto ScriptedPolicy::from_file(const std::filesystem::path& path) -> ScriptedPolicy {
    const auto j = nlohmann::ordered_json::parse(read_text_file(path), nullptr, false);
    if (j.is_discarded()) throw IoError("reply file " + path.string() + " is not valid JSON");
    if (j.is_array()) return ScriptedPolicy(j.get<std::vector<std::string>>());
    if (j.is_object()) {
        std::map<std::string, std::vector<std::string>> by_task;
        for (const auto& [k, v] : j.items()) by_task[k] = v.get<std::vector<std::string>>();
        return ScriptedPolicy(std::move(by_task));
    }
    throw IoError("reply file " + path.string() + " must hold an array or an object of arrays");
}

auto ScriptedPolicy::start(const TaskSpec& task) -> std::unique_ptr<PolicySession> {
    if (by_task_.empty()) return std::make_unique<ScriptedSession>(shared_);
    auto it = by_task_.find(task.task_id);
    if (it == by_task_.end()) return std::make_unique<ScriptedSession>(std::vector<std::string>{});
    return std::make_unique<ScriptedSession>(it->second);
}

auto IdentityPolicy::start(const TaskSpec& task) -> std::unique_ptr<PolicySession> {
    const auto wanted = task.target.schema.column_names();
    const std::set<std::string> target(wanted.begin(), wanted.end());
    std::string best;
    double best_score = -1.0;
    for (const auto& [name, table] : task.sources) {
        const auto cols = table->column_names();
        const std::set<std::string> have(cols.begin(), cols.end());
        std::size_t common = 0;
        for (const auto& c : have) common += target.count(c);
        const auto all = have.size() + target.size() - common;
        const double score = all == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(all);
        if (score > best_score) {
            best_score = score;
            best = name;
        }
    }
    std::string text = "<plan>The source table " + best + " already matches the target; answer with it.</plan>\n";
    text += "<answer>\ntarget: " + best + "\n</answer>\n";
    return std::make_unique<FixedSession>(std::move(text));
}

} // namespace adp
