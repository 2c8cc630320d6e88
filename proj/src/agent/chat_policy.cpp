#include <adp/agent.hpp>

#include <httplib.h>

namespace adp {

namespace {

struct Endpoint {
    std::string base;
    std::string path;
};

auto split_url(const std::string& url) -> Endpoint {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) throw Error("chat endpoint must be an http:// url: " + url);
    const auto slash = url.find('/', scheme.size());
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

class ChatSession final : public PolicySession {
public:
    explicit ChatSession(const ChatConfig& config) : config_(config), endpoint_(split_url(config.url)) {}

    auto reply(const std::vector<Message>& conversation) -> std::string override {
        httplib::Client client(endpoint_.base);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        client.set_write_timeout(config_.timeout);
        httplib::Headers headers;
        if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
        const auto body = ChatPolicy::encode_request(config_, conversation).dump();
        auto res = client.Post(endpoint_.path, headers, body, "application/json");
        if (!res) throw TransportError("chat request failed: " + httplib::to_string(res.error()));
        if (res->status != 200) {
            throw TransportError("chat endpoint returned HTTP " + std::to_string(res->status));
        }
        auto text = ChatPolicy::decode_response(res->body);
        if (auto u = ChatPolicy::decode_usage(res->body)) {
            if (!usage_) usage_ = TokenUsage{};
            usage_->input += u->input;
            usage_->output += u->output;
            usage_->cached_input += u->cached_input;
        }
        return text;
    }

    [[nodiscard]] auto usage() const -> std::optional<TokenUsage> override { return usage_; }

private:
    ChatConfig config_;
    Endpoint endpoint_;
    std::optional<TokenUsage> usage_;
};

} // namespace

ChatPolicy::ChatPolicy(ChatConfig config) : config_(std::move(config)) { split_url(config_.url); }

auto ChatPolicy::start(const TaskSpec&) -> std::unique_ptr<PolicySession> {
    return std::make_unique<ChatSession>(config_);
}

auto ChatPolicy::encode_request(const ChatConfig& config, const std::vector<Message>& conversation)
    -> nlohmann::ordered_json {
    auto messages = nlohmann::ordered_json::array();
    for (const auto& m : conversation) messages.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", config.model}, {"temperature", config.temperature}, {"messages", std::move(messages)}};
}

auto ChatPolicy::decode_response(std::string_view body) -> std::string {
    const auto j = nlohmann::ordered_json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw TransportError("chat response is not a JSON object");
    if (auto it = j.find("content"); it != j.end() && it->is_string()) return it->get<std::string>();
    if (auto it = j.find("choices"); it != j.end() && it->is_array() && !it->empty()) {
        const auto& first = (*it)[0];
        if (first.contains("message") && first["message"].contains("content") &&
            first["message"]["content"].is_string()) {
            return first["message"]["content"].get<std::string>();
        }
    }
    throw TransportError("chat response has neither `content` nor `choices[0].message.content`");
}

auto ChatPolicy::decode_usage(std::string_view body) -> std::optional<TokenUsage> {
    const auto j = nlohmann::ordered_json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    const auto it = j.find("usage");
    if (it == j.end() || !it->is_object()) return std::nullopt;
    auto count = [](const nlohmann::ordered_json& o, const char* key) -> std::size_t {
        const auto f = o.find(key);
        return f != o.end() && f->is_number_unsigned() ? f->get<std::size_t>() : 0;
    };
    const auto prompt = count(*it, "prompt_tokens");
    std::size_t cached = 0;
    if (auto d = it->find("prompt_tokens_details"); d != it->end() && d->is_object()) cached = count(*d, "cached_tokens");
    cached = std::min(cached, prompt);
    return TokenUsage{prompt - cached, count(*it, "completion_tokens"), cached};
}

} // namespace adp
