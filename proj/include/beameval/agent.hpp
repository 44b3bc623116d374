#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "beameval/backend.hpp"

namespace beameval {

struct CodeBlock {
    std::string language;  ///< info string after the opening fence, lowercased
    std::string body;
};

/// Last complete fenced (```) block in a response.
std::optional<CodeBlock> extract_last_code_block(std::string_view text);

/// Outcome of running one script. `status` is one of ok, timeout,
/// nonzero_exit, payload_missing, payload_malformed, error.
struct ExecutionResult {
    std::string status;
    std::optional<nlohmann::json> payload;
    std::string stdout_text;
    std::string stderr_text;
    std::string error;
    double wall_s = 0.0;
    nlohmann::json artifacts = nlohmann::json::object();
};

class ScriptExecutor {
public:
    virtual ~ScriptExecutor() = default;
    virtual std::string name() const = 0;
    virtual ExecutionResult execute(const std::string& script, double timeout_s) = 0;
};

/// Everything after the last delimiter line of a script's stdout, parsed.
/// Status is ok, payload_missing or payload_malformed.
ExecutionResult extract_payload(std::string stdout_text);

/// Solves a JSON model-document with the FE solver and returns its
/// reactions plus the model as the payload. Used when no script runtime is
/// available.
class ModelDocumentExecutor : public ScriptExecutor {
public:
    std::string name() const override { return "fem"; }
    ExecutionResult execute(const std::string& script, double timeout_s) override;
};

struct SandboxConfig {
    std::vector<std::string> command;  ///< runner executable and arguments
    double grace_s = 5.0;              ///< client deadline = job timeout + grace
};

/// Client of a long-lived runner process speaking newline-delimited JSON on
/// its standard streams. Request {id, op, script?, timeout?}; response {id,
/// status, payload?, error?, stdout?, stderr?, wall_s?, artifacts?}.
/// Requests from several threads are multiplexed by id.
class SandboxClient : public ScriptExecutor {
public:
    explicit SandboxClient(SandboxConfig config);
    ~SandboxClient() override;
    SandboxClient(const SandboxClient&) = delete;
    SandboxClient& operator=(const SandboxClient&) = delete;

    std::string name() const override { return "sandbox"; }
    ExecutionResult execute(const std::string& script, double timeout_s) override;

    /// {"status": "ok", "version": ..., "runtimes": {...}} from the runner.
    nlohmann::json health(double timeout_s = 10.0);

    bool running() const;

private:
    struct Impl;
    nlohmann::json call(nlohmann::json request, double deadline_s);

    SandboxConfig config_;
    std::unique_ptr<Impl> impl_;
};

/// Prompt -> language model -> last fenced block -> executor -> payload.
/// JSON blocks (language "json" or a body starting with '{') go to the
/// model-document executor; anything else to the script sandbox.
class AgentBackend : public Backend {
public:
    AgentBackend(std::shared_ptr<Backend> llm, std::shared_ptr<ScriptExecutor> sandbox,
                 std::shared_ptr<ScriptExecutor> model_executor = std::make_shared<ModelDocumentExecutor>(),
                 double timeout_s = 30.0);

    std::string name() const override { return "agent(" + llm_->name() + ")"; }
    BackendResponse invoke(const BackendRequest& request) override;

private:
    std::shared_ptr<Backend> llm_;
    std::shared_ptr<ScriptExecutor> sandbox_;
    std::shared_ptr<ScriptExecutor> model_executor_;
    double timeout_s_;
};

/// Failure kind for a non-ok execution status.
const char* failure_kind_for(std::string_view status);

}  // namespace beameval
