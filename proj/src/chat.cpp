#include "beameval/chat.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

namespace beameval {

namespace {

// Splits "https://host:port/prefix" into origin and path prefix.
std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw std::invalid_argument(fmt::format("endpoint '{}' has no scheme", url));
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, ""};
    auto prefix = url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, slash), prefix};
}

std::optional<double> retry_after(const httplib::Result& res) {
    if (!res || !res->has_header("Retry-After")) return std::nullopt;
    try {
        return std::stod(res->get_header_value("Retry-After"));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

ChatClient::ChatClient(ChatConfig config, Sleeper sleeper) : config_(std::move(config)), sleep_(std::move(sleeper)) {
    if (!sleep_)
        sleep_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
    if (config_.max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
    std::tie(origin_, path_) = split_url(config_.base_url);
    path_ += "/chat/completions";
    if (!config_.api_key_env.empty())
        if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) api_key_ = key;
}

nlohmann::json ChatClient::request_body(const std::vector<ChatMessage>& messages, const SamplingParams& params) const {
    nlohmann::json body;
    body["model"] = config_.model;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_tokens;
    if (params.seed) body["seed"] = *params.seed;
    return body;
}

std::string ChatClient::complete(const std::vector<ChatMessage>& messages, const SamplingParams& params) {
    const auto body = request_body(messages, params).dump();

    httplib::Client cli(origin_);
    const auto secs = std::chrono::duration<double>(config_.timeout_s);
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    cli.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    enum class Last { Network, RateLimited, Timeout } last = Last::Network;
    std::string last_detail;
    double delay = config_.backoff_initial_s;

    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
        const auto started = std::chrono::steady_clock::now();
        auto res = cli.Post(path_, headers, body, "application/json");
        std::optional<double> wait;

        if (!res) {
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            const auto err = res.error();
            const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                                   (err == httplib::Error::Read && elapsed >= 0.9 * config_.timeout_s);
            last = timed_out ? Last::Timeout : Last::Network;
            last_detail = httplib::to_string(err);
        } else if (res->status == 429) {
            last = Last::RateLimited;
            last_detail = "HTTP 429";
            wait = retry_after(res);
        } else if (res->status >= 500) {
            last = Last::Network;
            last_detail = fmt::format("HTTP {}", res->status);
        } else if (res->status != 200) {
            throw BackendError(fmt::format("endpoint rejected the request: HTTP {}: {}", res->status,
                                           res->body.substr(0, 500)));
        } else {
            nlohmann::json reply;
            try {
                reply = nlohmann::json::parse(res->body);
                const auto& content = reply.at("choices").at(0).at("message").at("content");
                if (content.is_null()) return "";
                return content.get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw BackendError(fmt::format("malformed chat-completion reply: {}", e.what()));
            }
        }

        if (attempt == config_.max_attempts) break;
        sleep_(std::min(wait.value_or(delay), config_.backoff_max_s));
        delay = std::min(delay * config_.backoff_factor, config_.backoff_max_s);
    }

    const auto msg = fmt::format("{} after {} attempts: {}", config_.base_url, config_.max_attempts, last_detail);
    switch (last) {
        case Last::RateLimited: throw RateLimited(msg);
        case Last::Timeout: throw Timeout(msg);
        case Last::Network: break;
    }
    throw NetworkError(msg);
}

std::vector<ChatMessage> messages_for(const PromptBundle& bundle) {
    std::vector<ChatMessage> messages;
    if (!bundle.system_text.empty()) messages.push_back({"system", bundle.system_text});
    messages.push_back({"user", bundle.user_text});
    return messages;
}

ChatBackend::ChatBackend(ChatConfig config, ChatClient::Sleeper sleeper)
    : client_(std::move(config), std::move(sleeper)) {}

BackendResponse ChatBackend::invoke(const BackendRequest& request) {
    const auto started = std::chrono::steady_clock::now();
    BackendResponse r;
    r.raw_text = client_.complete(messages_for(request.bundle), request.params);
    r.latency_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return r;
}

}  // namespace beameval
