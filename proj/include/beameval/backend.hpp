#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "beameval/prompt.hpp"

namespace beameval {

struct SamplingParams {
    double temperature = 0.7;
    int max_tokens = 4096;
    std::optional<std::uint64_t> seed;

    bool operator==(const SamplingParams&) const = default;
};

struct BackendRequest {
    std::string case_id;
    PromptBundle bundle;
    std::size_t run_index = 0;
    SamplingParams params;
};

/// Why a response carries no answer. `kind` is one of the failure_kind
/// strings below.
struct Failure {
    std::string kind;
    std::string detail;

    bool operator==(const Failure&) const = default;
};

namespace failure_kind {
inline constexpr const char* kCodeExtraction = "code_extraction";
inline constexpr const char* kSandboxTimeout = "sandbox_timeout";
inline constexpr const char* kSandboxNonzeroExit = "sandbox_nonzero_exit";
inline constexpr const char* kPayloadMissing = "payload_missing";
inline constexpr const char* kPayloadMalformed = "payload_malformed";
inline constexpr const char* kSandboxError = "sandbox_error";
inline constexpr const char* kModelDocument = "model_document";
inline constexpr const char* kNoAnswer = "no_answer";
}  // namespace failure_kind

struct Artifacts {
    std::optional<std::string> generated_script;
    std::optional<std::string> execution_log;
    std::optional<std::string> model_document;

    bool operator==(const Artifacts&) const = default;
};

struct BackendResponse {
    std::string raw_text;
    /// Result document {"reactions": [...], "model"?: {...}} when the
    /// backend produced one; raw_text is parsed otherwise.
    std::optional<nlohmann::json> structured_answer;
    Artifacts artifacts;
    double latency_s = 0.0;
    std::optional<Failure> failure;

    bool operator==(const BackendResponse&) const = default;
};

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Connection-level failure after the retry budget is spent.
class NetworkError : public BackendError {
public:
    using BackendError::BackendError;
};

class RateLimited : public BackendError {
public:
    using BackendError::BackendError;
};

class Timeout : public BackendError {
public:
    using BackendError::BackendError;
};

class TranscriptMiss : public BackendError {
public:
    using BackendError::BackendError;
};

/// One answer producer. Implementations must be safe to invoke from several
/// threads at once and must not keep state between requests that could
/// change an outcome.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual BackendResponse invoke(const BackendRequest& request) = 0;
};

nlohmann::ordered_json response_to_json(const BackendResponse& response);
BackendResponse response_from_json(const nlohmann::json& doc);

nlohmann::ordered_json params_to_json(const SamplingParams& params);
SamplingParams params_from_json(const nlohmann::json& doc);

}  // namespace beameval
