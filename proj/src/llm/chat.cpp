#include "vfx/llm/chat.hpp"

#include "vfx/core/error.hpp"
#include "vfx/core/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <regex>

namespace vfx {

nlohmann::json chat_request_json(const ChatRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const ChatMessage& m : request.messages) {
        if (m.image_png.empty()) {
            messages.push_back({{"role", m.role}, {"content", m.content}});
            continue;
        }
        const std::string url = "data:image/png;base64," + httplib::detail::base64_encode(m.image_png);
        messages.push_back({{"role", m.role},
                            {"content",
                             {{{"type", "text"}, {"text", m.content}},
                              {{"type", "image_url"}, {"image_url", {{"url", url}}}}}}});
    }
    return {{"model", request.model}, {"messages", messages}, {"temperature", request.temperature}};
}

ChatResponse chat_response_from_json(const nlohmann::json& body) {
    try {
        const auto& choice = body.at("choices").at(0);
        ChatResponse r;
        r.text = choice.at("message").at("content").get<std::string>();
        if (choice.contains("finish_reason") && choice["finish_reason"].is_string())
            r.finish_reason = choice["finish_reason"].get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::EndpointError, std::string("unexpected response shape: ") + e.what());
    }
}

void validate_endpoint_config(const EndpointConfig& cfg) {
    static const std::regex url_re(R"(^https?://[^/\s:]+(:\d+)?(/\S*)?$)");
    if (!std::regex_match(cfg.url, url_re)) throw Error(ErrorKind::ConfigError, "endpoint must be an http(s) URL: " + cfg.url);
    if (cfg.model.empty()) throw Error(ErrorKind::ConfigError, "model name is empty");
    if (!(cfg.temperature >= 0.0 && cfg.temperature <= 2.0))
        throw Error(ErrorKind::ConfigError, "temperature must lie in [0, 2]");
    if (cfg.max_attempts < 1) throw Error(ErrorKind::ConfigError, "max_attempts must be at least 1");
    if (cfg.api_key_env.empty()) throw Error(ErrorKind::ConfigError, "api_key_env is empty");
    if (cfg.timeout_seconds < 1) throw Error(ErrorKind::ConfigError, "timeout_seconds must be positive");
}

EndpointConfig load_endpoint_config(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        throw Error(ErrorKind::ConfigError, e.what());
    }
    EndpointConfig cfg;
    try {
        const auto j = nlohmann::json::parse(text);
        cfg.url = j.at("endpoint").get<std::string>();
        cfg.model = j.value("model", cfg.model);
        cfg.temperature = j.value("temperature", cfg.temperature);
        cfg.max_attempts = j.value("max_attempts", cfg.max_attempts);
        cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
        cfg.timeout_seconds = j.value("timeout_seconds", cfg.timeout_seconds);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ConfigError, path + ": " + e.what());
    }
    validate_endpoint_config(cfg);
    return cfg;
}

HttpChatEndpoint::HttpChatEndpoint(EndpointConfig cfg) : cfg_(std::move(cfg)) { validate_endpoint_config(cfg_); }

ChatResponse HttpChatEndpoint::complete(const ChatRequest& request) {
    ++requests_;
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (!key || !*key) throw Error(ErrorKind::ConfigError, "environment variable " + cfg_.api_key_env + " is not set");
    const auto scheme_end = cfg_.url.find("://") + 3;
    const auto path_start = cfg_.url.find('/', scheme_end);
    const std::string origin = cfg_.url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : cfg_.url.substr(path_start);

    httplib::Client client(origin);
    client.set_bearer_token_auth(key);
    client.set_connection_timeout(cfg_.timeout_seconds);
    client.set_read_timeout(cfg_.timeout_seconds);
    const auto res = client.Post(path, chat_request_json(request).dump(), "application/json");
    if (!res) throw Error(ErrorKind::EndpointError, "request to " + origin + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw Error(ErrorKind::EndpointError, "endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::EndpointError, std::string("response is not JSON: ") + e.what());
    }
    return chat_response_from_json(body);
}

ScriptedEndpoint::ScriptedEndpoint(std::vector<std::string> replies) : replies_(std::move(replies)) {
    if (replies_.empty()) throw Error(ErrorKind::PreconditionFailed, "scripted endpoint needs at least one reply");
}

ChatResponse ScriptedEndpoint::complete(const ChatRequest& request) {
    seen_.push_back(request);
    const size_t i = std::min<size_t>(requests_, replies_.size() - 1);
    ++requests_;
    return {replies_[i], "stop"};
}

}  // namespace vfx
