#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace vfx {

struct ChatMessage {
    std::string role;     // system | user | assistant
    std::string content;
    std::string image_png;  // raw PNG bytes attached to the message, empty for none
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
};

struct ChatResponse {
    std::string text;
    std::string finish_reason;
};

/// Chat-completion wire format: {model, messages:[{role, content}], temperature}
/// in, {choices:[{message:{content}, finish_reason}]} out. Messages with an
/// image use the content-part array form with a base64 data URL.
nlohmann::json chat_request_json(const ChatRequest& request);
/// Throws EndpointError when the body does not have the expected shape.
ChatResponse chat_response_from_json(const nlohmann::json& body);

class ChatEndpoint {
public:
    virtual ~ChatEndpoint() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    int requests() const { return requests_; }

protected:
    int requests_ = 0;
};

struct EndpointConfig {
    std::string url;  // http(s)://host[:port]/path
    std::string model = "default";
    double temperature = 0.0;
    int max_attempts = 3;
    std::string api_key_env = "VFXEDIT_API_KEY";
    int timeout_seconds = 120;
};

/// JSON keys: endpoint, model, temperature, max_attempts, api_key_env,
/// timeout_seconds. Throws ConfigError for missing or invalid values.
EndpointConfig load_endpoint_config(const std::string& path);
void validate_endpoint_config(const EndpointConfig& cfg);

/// HTTPS (or plain HTTP) POST with a bearer token read from the configured
/// environment variable at request time. Throws ConfigError when the variable
/// is unset and EndpointError on transport or HTTP failures.
class HttpChatEndpoint : public ChatEndpoint {
public:
    explicit HttpChatEndpoint(EndpointConfig cfg);
    ChatResponse complete(const ChatRequest& request) override;
    const EndpointConfig& config() const { return cfg_; }

private:
    EndpointConfig cfg_;
};

/// Replies with the given texts in order, repeating the last one. Keeps every request.
class ScriptedEndpoint : public ChatEndpoint {
public:
    explicit ScriptedEndpoint(std::vector<std::string> replies);
    ChatResponse complete(const ChatRequest& request) override;
    const std::vector<ChatRequest>& seen() const { return seen_; }

private:
    std::vector<std::string> replies_;
    std::vector<ChatRequest> seen_;
};

}  // namespace vfx
