// beameval: generate the beam benchmark, run evaluations against a backend,
// re-grade stores and render reports.
//
// Exit codes: 0 success, 1 unexpected error, 2 invalid input or manifest,
// 3 backend failure, 4 file-system failure.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "beameval/backend.hpp"
#include "beameval/benchmark.hpp"
#include "beameval/document.hpp"
#include "beameval/io.hpp"
#include "beameval/report.hpp"
#include "beameval/runner.hpp"

using namespace beameval;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUnexpected = 1, kValidation = 2, kBackend = 3, kIo = 4 };

struct RunFlags {
    std::string manifest_file;
    std::string cases = "benchmark";
    std::string backend = "mock";
    std::string endpoint;
    std::string model;
    std::string api_key_env = "BEAMEVAL_API_KEY";
    double temperature = 0.7;
    int max_tokens = 4096;
    std::optional<std::uint64_t> sampling_seed;
    std::uint64_t n = 500;
    unsigned concurrency = 8;
    std::uint64_t seed = 0;
    std::string out;
    std::vector<std::string> configs;
    std::string mock_file;
    std::optional<double> error_rate;
    bool text_answers = false;
    std::vector<std::string> sandbox;
    double script_timeout = 30.0;
    std::string transcript;
    std::string asset_dir;
    bool quiet = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool ablation) {
    cmd->add_option("--manifest", f.manifest_file, "Run manifest JSON; other flags are ignored except --out and --concurrency");
    if (!ablation)
        cmd->add_option("--cases", f.cases,
                        "benchmark | representative | extended | families:SS-I,... | problems:<dir>");
    cmd->add_option("--backend", f.backend, "mock | chat | agent | replay")
        ->check(CLI::IsMember({"mock", "chat", "agent", "replay"}));
    cmd->add_option("--endpoint", f.endpoint, "OpenAI-compatible base URL, e.g. https://host/v1");
    cmd->add_option("--model", f.model, "Model id sent to the endpoint");
    cmd->add_option("--api-key-env", f.api_key_env, "Name of the environment variable holding the API key");
    cmd->add_option("--temperature", f.temperature)->check(CLI::Range(0.0, 2.0));
    cmd->add_option("--max-tokens", f.max_tokens)->check(CLI::PositiveNumber);
    cmd->add_option("--sampling-seed", f.sampling_seed, "Seed forwarded to the endpoint");
    cmd->add_option("--n", f.n, "Independent runs per case")->check(CLI::PositiveNumber);
    cmd->add_option("--concurrency", f.concurrency, "Backend invocations in flight")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "Seed of all harness-side randomness (mock outcomes)");
    cmd->add_option("--out", f.out, "Output directory")->required();
    if (!ablation)
        cmd->add_option("--config", f.configs,
                        "Prompt config: proposed, baseline or an ablation name (repeatable)");
    cmd->add_option("--mock-options", f.mock_file, "Mock error profile JSON {profile, overrides, structured}");
    cmd->add_option("--error-rate", f.error_rate, "Mock shorthand: every run wrong with this probability")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--text-answers", f.text_answers, "Mock answers as plain text instead of structured payloads");
    cmd->add_option("--sandbox", f.sandbox, "Sandbox runner command and arguments (agent backend)")
        ->expected(1, -1);
    cmd->add_option("--script-timeout", f.script_timeout, "Seconds per generated script")->check(CLI::PositiveNumber);
    cmd->add_option("--transcript", f.transcript, "Transcript store to replay");
    cmd->add_option("--assets", f.asset_dir, "Prompt asset directory");
    cmd->add_flag("--quiet", f.quiet, "No progress output");
}

PromptConfig named_config(const std::string& name) {
    if (name == "proposed") return proposed_config();
    if (name == "baseline") return baseline_config();
    for (const auto& c : ablation_grid())
        if (c.name == name) return c;
    throw ManifestError(fmt::format("unknown prompt config '{}'", name));
}

RunManifest manifest_from_flags(const RunFlags& f, bool ablation) {
    if (!f.manifest_file.empty()) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(read_text_file(f.manifest_file));
        } catch (const nlohmann::json::parse_error& e) {
            throw ManifestError(fmt::format("{}: {}", f.manifest_file, e.what()));
        }
        auto m = manifest_from_json(doc);
        m.concurrency = f.concurrency;
        return m;
    }
    RunManifest m;
    m.kind = ablation ? "ablation" : "benchmark";
    m.cases = ablation ? "extended" : f.cases;
    if (!ablation && m.cases != "benchmark" && m.cases != "representative") m.kind = "custom";
    m.backend.kind = f.backend;
    m.backend.endpoint = f.endpoint;
    m.backend.model = f.model;
    m.backend.api_key_env = f.api_key_env;
    m.backend.sandbox_command = f.sandbox;
    m.backend.script_timeout_s = f.script_timeout;
    m.backend.transcript = f.transcript;
    if (!f.mock_file.empty()) {
        try {
            m.backend.mock = mock_options_from_json(nlohmann::json::parse(read_text_file(f.mock_file)));
        } catch (const nlohmann::json::parse_error& e) {
            throw ManifestError(fmt::format("{}: {}", f.mock_file, e.what()));
        }
    }
    if (f.error_rate) m.backend.mock.profile = ErrorProfile::error_rate(*f.error_rate);
    if (f.text_answers) m.backend.mock.structured = false;
    if (ablation) {
        m.configs = ablation_grid();
    } else if (!f.configs.empty()) {
        m.configs.clear();
        for (const auto& n : f.configs) m.configs.push_back(named_config(n));
    }
    m.n_total = f.n;
    m.concurrency = f.concurrency;
    m.seed = f.seed;
    m.params.temperature = f.temperature;
    m.params.max_tokens = f.max_tokens;
    m.params.seed = f.sampling_seed;
    m.asset_dir = f.asset_dir;
    // Re-validate through the JSON path so flag and file manifests obey the same rules.
    return manifest_from_json(nlohmann::json::parse(manifest_to_json(m).dump()));
}

ProgressFn progress_printer(bool quiet) {
    if (quiet) return {};
    auto last = std::make_shared<std::chrono::steady_clock::time_point>();
    return [last](const RunProgress& p) {
        const auto now = std::chrono::steady_clock::now();
        const auto remaining = p.planned - p.skipped;
        if (p.done != remaining && now - *last < std::chrono::milliseconds(500)) return;
        *last = now;
        fmt::print(stderr, "\r{} / {} runs ({} resumed)", p.done + p.skipped, p.planned, p.skipped);
        if (p.done == remaining) fmt::print(stderr, "\n");
    };
}

void print_summary(const EvaluationReport& report, const fs::path& out) {
    if (report.kind == "ablation") {
        std::cout << render_ablation_table(report);
    } else {
        for (const auto& s : report.series) {
            Fraction sum{0, 0};
            for (const auto& f : s.reliabilities) {
                sum.correct += f.correct;
                sum.total += f.total;
            }
            fmt::print("{:<24} {:<6} cases {:>3}  reliability {:.3f}  robustness {}\n", s.config_name, s.family,
                       s.case_ids.size(), sum.total ? sum.value() : 0.0, format_metric(s.robustness));
        }
    }
    fmt::print("report written to {}\n", (out / "report").string());
}

int guarded(const std::function<void()>& body) {
    try {
        body();
        return kOk;
    } catch (const BackendError& e) {
        fmt::print(stderr, "backend error: {}\n", e.what());
        fmt::print(stderr, "completed runs are recorded; rerun the same command to resume\n");
        return kBackend;
    } catch (const IoError& e) {
        fmt::print(stderr, "I/O error: {}\n", e.what());
        return kIo;
    } catch (const fs::filesystem_error& e) {
        fmt::print(stderr, "I/O error: {}\n", e.what());
        return kIo;
    } catch (const MissingAsset& e) {
        fmt::print(stderr, "I/O error: {}\n", e.what());
        return kIo;
    } catch (const ManifestError& e) {
        fmt::print(stderr, "invalid input: {}\n", e.what());
        return kValidation;
    } catch (const ParseError& e) {
        fmt::print(stderr, "invalid problem document: {}\n", e.what());
        return kValidation;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "invalid input: {}\n", e.what());
        return kValidation;
    } catch (const std::logic_error& e) {
        fmt::print(stderr, "inconsistent store: {}\n", e.what());
        return kValidation;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kUnexpected;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Beam structural-analysis evaluation harness"};
    app.require_subcommand(1);

    std::string gen_out;
    std::string gen_set = "benchmark";
    bool gen_benchmark = false, gen_extended = false, gen_representative = false;
    auto* gen = app.add_subcommand("generate", "Write problem documents and an oracle manifest");
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_flag("--benchmark", gen_benchmark, "Every load-position sweep of the 8 families");
    gen->add_flag("--extended", gen_extended, "The three extended tasks");
    gen->add_flag("--representative", gen_representative, "One case per family");
    gen->add_option("--cases", gen_set, "Case set, as for run");

    RunFlags run_flags, ablate_flags;
    auto* run = app.add_subcommand("run", "Evaluate a case set, resuming any partial run in --out");
    add_run_flags(run, run_flags, false);
    auto* ablate = app.add_subcommand("ablate", "Run the five prompt configs on the extended tasks");
    add_run_flags(ablate, ablate_flags, true);

    std::string grade_out;
    auto* grade = app.add_subcommand("grade", "Re-grade the transcript of an output directory and re-render");
    grade->add_option("--out", grade_out, "Output directory of a previous run")->required();

    std::string report_out;
    auto* report = app.add_subcommand("report", "Re-render the report of an output directory");
    report->add_option("--out", report_out, "Output directory of a previous run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    if (*gen) {
        return guarded([&] {
            auto set = gen_set;
            if (gen_benchmark + gen_extended + gen_representative > 1)
                throw ManifestError("choose one of --benchmark, --extended, --representative");
            if (gen_benchmark) set = "benchmark";
            if (gen_extended) set = "extended";
            if (gen_representative) set = "representative";
            const auto cases = resolve_cases(set);
            write_problem_tree(gen_out, cases);
            fmt::print("{} problems written to {}\n", cases.size(), gen_out);
        });
    }
    if (*run || *ablate) {
        const bool is_ablate = static_cast<bool>(*ablate);
        const auto& flags = is_ablate ? ablate_flags : run_flags;
        return guarded([&] {
            const auto manifest = manifest_from_flags(flags, is_ablate);
            const auto result = run_session(manifest, flags.out, nullptr, progress_printer(flags.quiet));
            print_summary(result, flags.out);
        });
    }
    if (*grade) {
        return guarded([&] {
            const auto manifest = manifest_from_json(nlohmann::json::parse(read_text_file(SessionPaths{grade_out}.manifest())));
            const auto changed = regrade_store(resolve_cases(manifest.cases), SessionPaths{grade_out}.transcript());
            fmt::print("{} grades changed\n", changed);
            print_summary(render_session(grade_out), grade_out);
        });
    }
    return guarded([&] { print_summary(render_session(report_out), report_out); });
}
