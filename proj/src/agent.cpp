#include "beameval/agent.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

#include <boost/process.hpp>
#include <fmt/format.h>

#include "beameval/document.hpp"
#include "beameval/fem.hpp"
#include "beameval/prompt.hpp"

namespace bp = boost::process;

namespace beameval {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

ExecutionResult from_response(const nlohmann::json& r) {
    ExecutionResult out;
    out.status = r.value("status", std::string("error"));
    if (const auto p = r.find("payload"); p != r.end() && !p->is_null()) out.payload = *p;
    out.stdout_text = r.value("stdout", std::string{});
    out.stderr_text = r.value("stderr", std::string{});
    out.error = r.value("error", std::string{});
    out.wall_s = r.value("wall_s", 0.0);
    if (const auto a = r.find("artifacts"); a != r.end() && a->is_object()) out.artifacts = *a;
    return out;
}

}  // namespace

std::optional<CodeBlock> extract_last_code_block(std::string_view text) {
    std::optional<CodeBlock> last;
    std::optional<CodeBlock> open;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        const auto t = trim(line);
        if (t.substr(0, 3) == "```") {
            if (open) {
                last = std::move(open);
                open.reset();
            } else {
                CodeBlock b;
                b.language = std::string(trim(t.substr(3)));
                for (auto& c : b.language) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                open = std::move(b);
            }
        } else if (open) {
            open->body.append(line);
            open->body.push_back('\n');
        }
        pos = nl + 1;
    }
    return last;
}

ExecutionResult extract_payload(std::string stdout_text) {
    ExecutionResult out;
    const auto at = stdout_text.rfind(kResultDelimiter);
    if (at == std::string::npos) {
        out.status = "payload_missing";
        out.error = fmt::format("no {} line in the output", kResultDelimiter);
    } else {
        const auto body = std::string_view(stdout_text).substr(at + kResultDelimiter.size());
        try {
            out.payload = nlohmann::json::parse(body.begin(), body.end());
            out.status = "ok";
        } catch (const nlohmann::json::parse_error& e) {
            out.status = "payload_malformed";
            out.error = e.what();
        }
    }
    out.stdout_text = std::move(stdout_text);
    return out;
}

const char* failure_kind_for(std::string_view status) {
    if (status == "timeout") return failure_kind::kSandboxTimeout;
    if (status == "nonzero_exit") return failure_kind::kSandboxNonzeroExit;
    if (status == "payload_missing") return failure_kind::kPayloadMissing;
    if (status == "payload_malformed") return failure_kind::kPayloadMalformed;
    return failure_kind::kSandboxError;
}

ExecutionResult ModelDocumentExecutor::execute(const std::string& script, double) {
    const auto started = std::chrono::steady_clock::now();
    ExecutionResult out;
    try {
        const auto doc = fem::parse_model_document(script);
        const auto sol = fem::analyze(doc.model, doc.overrides);
        nlohmann::json reactions = nlohmann::json::array();
        for (const auto& r : sol.reactions.entries) {
            nlohmann::json e{{"position", doc.model.supports[r.support_index].position_m}, {"V", r.vertical_kN}};
            if (r.horizontal_kN) e["H"] = *r.horizontal_kN;
            if (r.moment_kNm) e["M"] = *r.moment_kNm;
            reactions.push_back(std::move(e));
        }
        out.payload = nlohmann::json{{"reactions", std::move(reactions)},
                                     {"model", nlohmann::json::parse(model_to_json(doc.model).dump())}};
        out.status = "ok";
    } catch (const ParseError& e) {
        out.status = "payload_malformed";
        out.error = e.field().empty() ? e.what() : fmt::format("{}: {}", e.field(), e.what());
    } catch (const std::exception& e) {
        out.status = "error";
        out.error = e.what();
    }
    out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

// --- sandbox client ---------------------------------------------------------

struct SandboxClient::Impl {
    bp::opstream in;
    bp::ipstream out;
    bp::child child;
    std::thread reader;

    std::mutex write_mutex;
    std::mutex mutex;
    std::condition_variable cv;
    std::map<std::string, nlohmann::json> replies;
    bool closed = false;
    std::atomic<std::uint64_t> next_id{1};

    void read_loop() {
        std::string line;
        while (std::getline(out, line)) {
            nlohmann::json msg;
            try {
                msg = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error&) {
                continue;  // stray output from the runner itself
            }
            if (!msg.is_object() || !msg.contains("id") || !msg["id"].is_string()) continue;
            auto id = msg["id"].get<std::string>();
            std::lock_guard lock(mutex);
            replies[std::move(id)] = std::move(msg);
            cv.notify_all();
        }
        std::lock_guard lock(mutex);
        closed = true;
        cv.notify_all();
    }
};

SandboxClient::SandboxClient(SandboxConfig config) : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
    if (config_.command.empty()) throw std::invalid_argument("sandbox command is empty");
    const auto exe = bp::search_path(config_.command[0]);
    const auto path = exe.empty() ? boost::filesystem::path(config_.command[0]) : exe;
    std::vector<std::string> args(config_.command.begin() + 1, config_.command.end());
    try {
        impl_->child = bp::child(path, bp::args(args), bp::std_in < impl_->in, bp::std_out > impl_->out);
    } catch (const bp::process_error& e) {
        throw BackendError(fmt::format("cannot start sandbox runner '{}': {}", config_.command[0], e.what()));
    }
    impl_->reader = std::thread([impl = impl_.get()] { impl->read_loop(); });
}

SandboxClient::~SandboxClient() {
    try {
        impl_->in.pipe().close();
        if (impl_->child.valid()) {
            const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
            while (impl_->child.running() && std::chrono::steady_clock::now() < deadline)
                std::this_thread::sleep_for(std::chrono::milliseconds(10));
            if (impl_->child.running()) impl_->child.terminate();
            impl_->child.wait();
        }
    } catch (const std::exception&) {
    }
    if (impl_->reader.joinable()) impl_->reader.join();
}

bool SandboxClient::running() const {
    std::lock_guard lock(impl_->mutex);
    return !impl_->closed;
}

nlohmann::json SandboxClient::call(nlohmann::json request, double deadline_s) {
    const auto id = fmt::format("r{}", impl_->next_id++);
    request["id"] = id;
    {
        std::lock_guard lock(impl_->write_mutex);
        impl_->in << request.dump() << '\n';
        impl_->in.flush();
        if (!impl_->in) return {{"id", id}, {"status", "error"}, {"error", "sandbox runner is not accepting requests"}};
    }
    std::unique_lock lock(impl_->mutex);
    const bool got = impl_->cv.wait_for(lock, std::chrono::duration<double>(deadline_s),
                                        [&] { return impl_->replies.count(id) > 0 || impl_->closed; });
    if (const auto it = impl_->replies.find(id); it != impl_->replies.end()) {
        auto reply = std::move(it->second);
        impl_->replies.erase(it);
        return reply;
    }
    if (!got) return {{"id", id}, {"status", "timeout"}, {"error", "no reply from the sandbox runner before the deadline"}};
    return {{"id", id}, {"status", "error"}, {"error", "sandbox runner exited"}};
}

ExecutionResult SandboxClient::execute(const std::string& script, double timeout_s) {
    return from_response(
        call({{"op", "execute"}, {"script", script}, {"timeout", timeout_s}}, timeout_s + config_.grace_s));
}

nlohmann::json SandboxClient::health(double timeout_s) { return call({{"op", "health"}}, timeout_s); }

// --- agent ------------------------------------------------------------------

AgentBackend::AgentBackend(std::shared_ptr<Backend> llm, std::shared_ptr<ScriptExecutor> sandbox,
                           std::shared_ptr<ScriptExecutor> model_executor, double timeout_s)
    : llm_(std::move(llm)),
      sandbox_(std::move(sandbox)),
      model_executor_(std::move(model_executor)),
      timeout_s_(timeout_s) {}

BackendResponse AgentBackend::invoke(const BackendRequest& request) {
    auto r = llm_->invoke(request);
    if (r.failure) return r;
    r.structured_answer.reset();

    const auto block = extract_last_code_block(r.raw_text);
    if (!block) {
        r.failure = Failure{failure_kind::kCodeExtraction, "response contains no fenced code block"};
        return r;
    }
    r.artifacts.generated_script = block->body;

    const bool is_model = block->language == "json" || trim(block->body).substr(0, 1) == "{";
    ScriptExecutor* exec = is_model ? model_executor_.get() : sandbox_.get();
    if (!exec) {
        r.failure = Failure{failure_kind::kSandboxError, "no script runtime is configured for this code block"};
        return r;
    }
    const auto result = exec->execute(block->body, timeout_s_);
    std::string log = result.stdout_text;
    if (!result.stderr_text.empty()) log += (log.empty() ? "" : "\n") + result.stderr_text;
    if (!result.error.empty()) log += (log.empty() ? "" : "\n") + result.error;
    if (!log.empty()) r.artifacts.execution_log = log;

    if (result.status != "ok" || !result.payload) {
        r.failure = Failure{failure_kind_for(result.status), result.error.empty() ? result.status : result.error};
        return r;
    }
    if (const auto m = result.payload->find("model"); m != result.payload->end()) r.artifacts.model_document = m->dump(2);
    r.structured_answer = *result.payload;
    return r;
}

}  // namespace beameval
