// Minimal runner for tests: speaks the sandbox IPC protocol and executes
// each script with /bin/sh in its own scratch directory.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <boost/process.hpp>
#include <nlohmann/json.hpp>

#include "beameval/agent.hpp"

namespace bp = boost::process;
namespace fs = std::filesystem;

namespace {

std::mutex out_mutex;

void reply(const nlohmann::json& msg) {
    std::lock_guard lock(out_mutex);
    std::cout << msg.dump() << std::endl;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json run_job(const std::string& id, const std::string& script, double timeout_s) {
    char tmpl[] = "/tmp/stub_runner_XXXXXX";
    const fs::path scratch = ::mkdtemp(tmpl);
    std::ofstream(scratch / "script.sh") << script;

    const auto started = std::chrono::steady_clock::now();
    bp::child c(bp::search_path("sh"), "script.sh", bp::start_dir(scratch.string()),
                bp::std_out > (scratch / "stdout").string(), bp::std_err > (scratch / "stderr").string(),
                bp::std_in < bp::null);
    // child::wait_for is unreliable with several children in flight; poll instead.
    const auto deadline = started + std::chrono::duration<double>(timeout_s);
    bool done = false;
    while (!(done = !c.running()) && std::chrono::steady_clock::now() < deadline)
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    if (!done) {
        c.terminate();
        c.wait();
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    nlohmann::json r{{"id", id}, {"wall_s", wall}, {"stderr", slurp(scratch / "stderr")},
                     {"artifacts", {{"scratch", scratch.string()}}}};
    const auto out = slurp(scratch / "stdout");
    r["stdout"] = out;
    if (!done) {
        r["status"] = "timeout";
        r["error"] = "killed after timeout";
    } else if (c.exit_code() != 0) {
        r["status"] = "nonzero_exit";
        r["error"] = "exit code " + std::to_string(c.exit_code());
    } else {
        const auto p = beameval::extract_payload(out);
        r["status"] = p.status;
        if (p.payload) r["payload"] = *p.payload;
        if (!p.error.empty()) r["error"] = p.error;
    }
    return r;
}

}  // namespace

int main() {
    std::vector<std::thread> jobs;
    std::string line;
    while (std::getline(std::cin, line)) {
        nlohmann::json req;
        try {
            req = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            reply({{"id", nullptr}, {"status", "error"}, {"error", std::string("malformed request: ") + e.what()}});
            continue;
        }
        const auto id = req.value("id", std::string{});
        const auto op = req.value("op", std::string("execute"));
        if (op == "health") {
            reply({{"id", id}, {"status", "ok"}, {"version", "stub-1"}, {"runtimes", {{"sh", true}, {"openseespy", false}}}});
        } else if (op == "execute" && req.contains("script") && req["script"].is_string()) {
            jobs.emplace_back([id, script = req["script"].get<std::string>(), t = req.value("timeout", 30.0)] {
                reply(run_job(id, script, t));
            });
        } else {
            reply({{"id", id}, {"status", "error"}, {"error", "unknown op or missing script"}});
        }
    }
    for (auto& j : jobs) j.join();
}
