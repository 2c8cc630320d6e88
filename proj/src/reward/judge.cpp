#include <adp/reward.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>

namespace adp {

namespace {

auto lower(std::string_view s) -> std::string {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

auto is_word(char c) -> bool { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

auto starts_with_path(const OpList& path, const OpList& prefix) -> bool {
    if (prefix.size() > path.size()) return false;
    return std::equal(prefix.begin(), prefix.end(), path.begin());
}

auto common_prefix(const OpList& a, const OpList& b) -> std::size_t {
    std::size_t n = 0;
    while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
    return n;
}

auto last_token(std::string_view s) -> std::string {
    auto end = s.size();
    while (end > 0 && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    auto start = end;
    while (start > 0 && !std::isspace(static_cast<unsigned char>(s[start - 1]))) --start;
    return std::string(s.substr(start, end - start));
}

auto ratio(std::size_t hits, std::size_t events) -> double {
    return events == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(events);
}

} // namespace

auto mentions_name(std::string_view text, std::string_view name) -> bool {
    if (name.empty()) return true;
    const auto hay = lower(text);
    const auto needle = lower(name);
    std::size_t pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word(hay[pos - 1]) || !is_word(needle.front());
        const auto after = pos + needle.size();
        const bool right_ok = after == hay.size() || !is_word(hay[after]) || !is_word(needle.back());
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

auto RuleJudge::judge(const Trajectory& t) -> JudgeScores {
    JudgeScores s;

    std::size_t consistent = 0;
    for (const auto& turn : t.turns) {
        ++s.consistency_events;
        bool all = true;
        for (const auto& op : turn.expand.ops) {
            for (const auto& name : op.mentioned_names()) all = all && mentions_name(turn.plan, name);
        }
        consistent += all ? 1 : 0;
    }
    s.consistency = ratio(consistent, s.consistency_events);

    std::size_t responsive = 0;
    for (std::size_t i = 0; i < t.turns.size(); ++i) {
        const auto& failure = t.turns[i].failure;
        if (!failure) continue;
        const std::string* next_plan = nullptr;
        if (i + 1 < t.turns.size()) {
            next_plan = &t.turns[i + 1].plan;
        } else if (t.answer) {
            next_plan = &t.answer_plan;
        }
        if (!next_plan) continue;
        ++s.responsiveness_events;
        const auto plan = lower(*next_plan);
        const auto& detail = failure->error.detail;
        const bool hit = plan.find(lower(failure->attempted_op.name())) != std::string::npos ||
                         (!detail.empty() && plan.find(lower(detail)) != std::string::npos) ||
                         (!last_token(detail).empty() && mentions_name(plan, last_token(detail)));
        responsive += hit ? 1 : 0;
    }
    s.responsiveness = ratio(responsive, s.responsiveness_events);

    std::size_t justified = 0;
    OpList frontier;
    std::vector<OpList> failed_at;
    for (const auto& turn : t.turns) {
        if (!starts_with_path(turn.parent_path, frontier)) {
            ++s.justification_events;
            const auto common = common_prefix(frontier, turn.parent_path);
            const OpList branch(frontier.begin(), frontier.begin() + static_cast<std::ptrdiff_t>(common + 1));
            const bool evidence = std::any_of(failed_at.begin(), failed_at.end(),
                                              [&](const OpList& p) { return starts_with_path(p, branch); });
            justified += evidence ? 1 : 0;
        }
        if (turn.failure) failed_at.push_back(turn.leaf_path);
        frontier = turn.leaf_path;
    }
    s.justification = ratio(justified, s.justification_events);
    return s;
}

auto ChatJudge::prompt(const Trajectory& t) -> std::string {
    std::string out =
        "Score the following data preparation trajectory between 0 and 1 against three criteria:\n"
        "(1) Plan-action consistency: whether the generated pipeline (from <expand>) correctly implements "
        "the plan (from <plan>).\n"
        "(2) Feedback responsiveness: whether later plans react to errors reported in <execute> feedback.\n"
        "(3) Backtracking justification: whether parent-node switches are supported by recorded failure "
        "evidence from the current branch.\n"
        "Reply with a single number.\n\n";
    for (const auto& turn : t.turns) {
        out += "turn " + std::to_string(turn.turn) + "\n<plan>" + turn.plan + "</plan>\n<expand>\nparent:\n" +
               serialize_pipeline(turn.parent_path) + "ops:\n" + serialize_pipeline(turn.expand.ops) +
               "</expand>\n<execute>\n" + turn.execute_feedback + "</execute>\n";
    }
    if (t.answer) {
        out += "<plan>" + t.answer_plan + "</plan>\n<answer>\n" + serialize_pipeline(t.answer->path) + "</answer>\n";
    }
    return out;
}

auto ChatJudge::parse_score(std::string_view reply) -> double {
    for (std::size_t i = 0; i < reply.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(reply[i]))) continue;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(reply.data() + i, reply.data() + reply.size(), v);
        if (ec == std::errc()) return std::clamp(v, 0.0, 1.0);
    }
    throw TransportError("judge reply holds no score");
}

auto ChatJudge::score(const Trajectory& t) -> double {
    TaskSpec none;
    auto session = policy_.start(none);
    return parse_score(session->reply({{"user", prompt(t)}}));
}

} // namespace adp
