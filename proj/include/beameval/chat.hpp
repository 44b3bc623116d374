#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beameval/backend.hpp"

namespace beameval {

struct ChatConfig {
    std::string base_url;          ///< e.g. "https://host/v1"; "/chat/completions" is appended
    std::string model;
    std::string api_key_env = "BEAMEVAL_API_KEY";  ///< variable holding the bearer token
    int max_attempts = 4;
    double backoff_initial_s = 1.0;
    double backoff_factor = 2.0;
    double backoff_max_s = 30.0;
    double timeout_s = 120.0;
};

struct ChatMessage {
    std::string role;
    std::string content;
};

/// OpenAI-compatible chat-completions client. Connection failures and 5xx
/// replies are retried with exponential backoff, 429 replies honour
/// Retry-After. Once the attempts are spent the last failure is thrown as
/// NetworkError, RateLimited or Timeout; other 4xx replies throw
/// BackendError at once.
class ChatClient {
public:
    using Sleeper = std::function<void(double seconds)>;

    explicit ChatClient(ChatConfig config, Sleeper sleeper = {});

    /// Returns choices[0].message.content.
    std::string complete(const std::vector<ChatMessage>& messages, const SamplingParams& params);

    /// Request body sent for the given messages (exposed for tests).
    nlohmann::json request_body(const std::vector<ChatMessage>& messages, const SamplingParams& params) const;

    const ChatConfig& config() const { return config_; }

private:
    ChatConfig config_;
    Sleeper sleep_;
    std::string api_key_;
    std::string origin_;
    std::string path_;
};

/// The system prompt and rendered problem as one fresh conversation per
/// request; the reply is the raw answer text.
class ChatBackend : public Backend {
public:
    explicit ChatBackend(ChatConfig config, ChatClient::Sleeper sleeper = {});

    std::string name() const override { return "chat"; }
    BackendResponse invoke(const BackendRequest& request) override;

    ChatClient& client() { return client_; }

private:
    ChatClient client_;
};

std::vector<ChatMessage> messages_for(const PromptBundle& bundle);

}  // namespace beameval
