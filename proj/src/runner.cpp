#include "beameval/runner.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "beameval/agent.hpp"
#include "beameval/chat.hpp"
#include "beameval/grader.hpp"
#include "beameval/hash.hpp"
#include "beameval/io.hpp"
#include "beameval/replay.hpp"
#include "beameval/report.hpp"
#include "beameval/statics.hpp"

namespace beameval {

namespace {

const std::vector<std::string> kBackendKinds = {"mock", "replay", "chat", "agent"};
const std::vector<std::string> kReportKinds = {"benchmark", "ablation", "custom"};

template <typename T>
T get_or(const nlohmann::json& doc, const char* key, T fallback) {
    const auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(fmt::format("manifest field '{}': {}", key, e.what()));
    }
}

// Manifest fields that determine results.
nlohmann::ordered_json results_json(const RunManifest& m) {
    auto doc = manifest_to_json(m);
    doc.erase("concurrency");
    doc.erase("asset_dir");
    return doc;
}

std::vector<CaseInfo> case_infos(const std::vector<BenchmarkCase>& cases) {
    std::vector<CaseInfo> out;
    for (const auto& c : cases) out.push_back({c.id, c.family, c.position_m});
    return out;
}

PromptAssets assets_for(const RunManifest& m) {
    return load_prompt_assets(m.asset_dir.empty() ? default_asset_dir() : std::filesystem::path(m.asset_dir));
}

std::vector<BenchmarkCase> diagram_cases(const std::vector<BenchmarkCase>& cases) {
    return cases.size() <= 16 ? cases : std::vector<BenchmarkCase>{};
}

}  // namespace

nlohmann::ordered_json mock_options_to_json(const MockOptions& o) {
    nlohmann::ordered_json doc;
    doc["profile"] = profile_to_json(o.profile);
    doc["overrides"] = nlohmann::ordered_json::array();
    for (const auto& [key, p] : o.overrides)
        doc["overrides"].push_back({{"config", key.first}, {"case", key.second}, {"profile", profile_to_json(p)}});
    doc["structured"] = o.structured;
    return doc;
}

MockOptions mock_options_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ManifestError("mock options must be an object");
    MockOptions o;
    try {
        if (doc.contains("profile")) o.profile = profile_from_json(doc["profile"]);
        for (const auto& e : doc.value("overrides", nlohmann::json::array())) {
            const auto key = std::make_pair(e.value("config", std::string{}), e.value("case", std::string{}));
            if (key.first.empty()) throw ManifestError("mock override needs a config name");
            if (!o.overrides.emplace(key, profile_from_json(e.at("profile"))).second)
                throw ManifestError(fmt::format("duplicate mock override for '{}' / '{}'", key.first, key.second));
        }
        o.structured = doc.value("structured", true);
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(fmt::format("mock options: {}", e.what()));
    } catch (const ManifestError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ManifestError(fmt::format("mock options: {}", e.what()));
    }
    return o;
}

nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json doc;
    doc["kind"] = m.kind;
    doc["cases"] = m.cases;
    nlohmann::ordered_json b;
    b["kind"] = m.backend.kind;
    if (m.backend.kind == "chat" || m.backend.kind == "agent") {
        b["endpoint"] = m.backend.endpoint;
        b["model"] = m.backend.model;
        b["api_key_env"] = m.backend.api_key_env;
    }
    if (m.backend.kind == "agent") {
        b["sandbox_command"] = m.backend.sandbox_command;
        b["script_timeout_s"] = m.backend.script_timeout_s;
    }
    if (m.backend.kind == "replay") b["transcript"] = m.backend.transcript;
    if (m.backend.kind == "mock") b["mock"] = mock_options_to_json(m.backend.mock);
    doc["backend"] = std::move(b);
    doc["configs"] = nlohmann::ordered_json::array();
    for (const auto& c : m.configs) doc["configs"].push_back(config_to_json(c));
    doc["n_total"] = m.n_total;
    doc["concurrency"] = m.concurrency;
    doc["seed"] = m.seed;
    doc["params"] = params_to_json(m.params);
    doc["asset_dir"] = m.asset_dir;
    return doc;
}

RunManifest manifest_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ManifestError("manifest must be a JSON object");
    RunManifest m;
    m.kind = get_or<std::string>(doc, "kind", m.kind);
    if (std::find(kReportKinds.begin(), kReportKinds.end(), m.kind) == kReportKinds.end())
        throw ManifestError(fmt::format("unknown run kind '{}'", m.kind));
    m.cases = get_or<std::string>(doc, "cases", m.cases);

    const auto b = doc.value("backend", nlohmann::json::object());
    m.backend.kind = get_or<std::string>(b, "kind", m.backend.kind);
    if (std::find(kBackendKinds.begin(), kBackendKinds.end(), m.backend.kind) == kBackendKinds.end())
        throw ManifestError(fmt::format("unknown backend '{}'", m.backend.kind));
    m.backend.endpoint = get_or<std::string>(b, "endpoint", "");
    m.backend.model = get_or<std::string>(b, "model", "");
    m.backend.api_key_env = get_or<std::string>(b, "api_key_env", m.backend.api_key_env);
    m.backend.sandbox_command = get_or<std::vector<std::string>>(b, "sandbox_command", {});
    m.backend.script_timeout_s = get_or<double>(b, "script_timeout_s", m.backend.script_timeout_s);
    m.backend.transcript = get_or<std::string>(b, "transcript", "");
    if (b.contains("mock")) m.backend.mock = mock_options_from_json(b["mock"]);
    if (b.contains("api_key") || doc.contains("api_key"))
        throw ManifestError("credentials are read from the environment variable named by api_key_env, not the manifest");

    if (doc.contains("configs")) {
        m.configs.clear();
        try {
            for (const auto& c : doc["configs"]) m.configs.push_back(config_from_json(c));
        } catch (const nlohmann::json::exception& e) {
            throw ManifestError(fmt::format("manifest configs: {}", e.what()));
        }
    }
    m.n_total = get_or<std::uint64_t>(doc, "n_total", m.n_total);
    m.concurrency = get_or<unsigned>(doc, "concurrency", m.concurrency);
    m.seed = get_or<std::uint64_t>(doc, "seed", m.seed);
    if (doc.contains("params")) {
        try {
            m.params = params_from_json(doc["params"]);
        } catch (const nlohmann::json::exception& e) {
            throw ManifestError(fmt::format("manifest params: {}", e.what()));
        }
    }
    m.asset_dir = get_or<std::string>(doc, "asset_dir", "");

    if (m.n_total == 0) throw ManifestError("n_total must be positive");
    if (m.concurrency == 0) throw ManifestError("concurrency must be positive");
    if (m.configs.empty()) throw ManifestError("at least one prompt config is required");
    std::set<std::string> names;
    for (const auto& c : m.configs)
        if (!names.insert(c.name).second) throw ManifestError(fmt::format("duplicate prompt config '{}'", c.name));
    if ((m.backend.kind == "chat" || m.backend.kind == "agent") && (m.backend.endpoint.empty() || m.backend.model.empty()))
        throw ManifestError(fmt::format("backend '{}' needs an endpoint and a model", m.backend.kind));
    if (m.backend.kind == "replay" && m.backend.transcript.empty())
        throw ManifestError("backend 'replay' needs a transcript path");
    return m;
}

std::string manifest_fingerprint(const RunManifest& manifest) {
    return sha256_hex(results_json(manifest).dump());
}

std::vector<BenchmarkCase> resolve_cases(const std::string& spec) {
    if (spec == "benchmark") return generate_all_sweeps();
    if (spec == "representative") return generate_benchmark();
    if (spec == "extended") return extended_tasks();
    if (spec.rfind("families:", 0) == 0) {
        std::vector<BenchmarkCase> out;
        std::string_view rest(spec);
        rest.remove_prefix(9);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto id = rest.substr(0, comma);
            const auto fam = parse_family(id);
            if (!fam) throw ManifestError(fmt::format("unknown family '{}'", id));
            for (auto& c : generate_sweep(*fam)) out.push_back(std::move(c));
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        if (out.empty()) throw ManifestError("empty family list");
        return out;
    }
    if (spec.rfind("problems:", 0) == 0) return read_problem_tree(spec.substr(9));
    throw ManifestError(fmt::format("unknown case set '{}'", spec));
}

std::shared_ptr<Backend> make_backend(const RunManifest& m, const std::vector<BenchmarkCase>& cases) {
    const auto& b = m.backend;
    if (b.kind == "mock") {
        auto o = b.mock;
        o.seed = m.seed;
        return std::make_shared<MockBackend>(cases, std::move(o));
    }
    if (b.kind == "replay") return std::make_shared<ReplayBackend>(std::make_shared<TranscriptStore>(b.transcript));
    ChatConfig chat;
    chat.base_url = b.endpoint;
    chat.model = b.model;
    chat.api_key_env = b.api_key_env;
    auto llm = std::make_shared<ChatBackend>(chat);
    if (b.kind == "chat") return llm;
    std::shared_ptr<ScriptExecutor> sandbox;
    if (!b.sandbox_command.empty()) {
        auto client = std::make_shared<SandboxClient>(SandboxConfig{b.sandbox_command, 5.0});
        const auto h = client->health();
        const bool usable = h.value("status", "") == "ok" && h.contains("runtimes") &&
                            std::any_of(h["runtimes"].begin(), h["runtimes"].end(),
                                        [](const nlohmann::json& v) { return v == true; });
        if (usable) {
            sandbox = std::move(client);
        } else {
            // Scripts then fail as sandbox_error; model documents still run on the FE solver.
            fmt::print(stderr, "warning: sandbox runner reports no usable runtime ({}); "
                               "falling back to model-document execution\n", h.dump());
        }
    }
    return std::make_shared<AgentBackend>(llm, sandbox, std::make_shared<ModelDocumentExecutor>(), b.script_timeout_s);
}

RunProgress execute_runs(const RunManifest& manifest, const std::vector<BenchmarkCase>& cases,
                         const PromptAssets& assets, Backend& backend, TranscriptStore& store,
                         const ProgressFn& progress) {
    struct Prepared {
        const BenchmarkCase* c;
        const PromptConfig* config;
        PromptBundle bundle;
        ReactionSet oracle;
    };
    std::vector<Prepared> prepared;
    for (const auto& cfg : manifest.configs)
        for (const auto& c : cases)
            prepared.push_back(
                {&c, &cfg, assemble(cfg, assets, render_problem_text(c.model, c.required)), solve_reactions(c.model)});

    RunProgress state;
    std::vector<std::pair<const Prepared*, std::size_t>> jobs;
    for (const auto& p : prepared)
        for (std::size_t run = 0; run < manifest.n_total; ++run) {
            ++state.planned;
            if (store.contains({p.c->id, p.bundle.fingerprint, run}))
                ++state.skipped;
            else
                jobs.emplace_back(&p, run);
        }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex mutex;
    std::exception_ptr error;
    const auto name = backend.name();

    auto worker = [&] {
        while (!stop) {
            const std::size_t j = next++;
            if (j >= jobs.size()) return;
            const auto& [p, run] = jobs[j];

            RunRecord rec;
            rec.case_id = p->c->id;
            rec.fingerprint = p->bundle.fingerprint;
            rec.config_name = p->config->name;
            rec.run_index = run;
            rec.backend = name;
            rec.params = manifest.params;
            rec.started_at = utc_now();
            try {
                BackendRequest req{p->c->id, p->bundle, run, manifest.params};
                rec.response = backend.invoke(req);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
                stop = true;
                return;
            }
            rec.finished_at = utc_now();
            rec.grade = grade_response(rec.response, p->c->model, p->oracle, p->c->required);
            store.append(rec);

            std::lock_guard lock(mutex);
            ++state.done;
            if (progress) progress(state);
        }
    };

    const unsigned n = std::max(1u, std::min<unsigned>(manifest.concurrency, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n && !jobs.empty(); ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return state;
}

EvaluationReport evaluate(const RunManifest& manifest, const std::vector<BenchmarkCase>& cases,
                          const PromptAssets& assets, const TranscriptStore& store) {
    auto report = aggregate(store.records(), case_infos(cases), manifest.configs, manifest.n_total, manifest.kind);
    report.provenance["manifest"] = results_json(manifest);
    report.provenance["manifest_fingerprint"] = manifest_fingerprint(manifest);
    report.provenance["asset_version"] = assets.version;
    return report;
}

std::size_t regrade_store(const std::vector<BenchmarkCase>& cases, const std::filesystem::path& transcript) {
    std::map<std::string, const BenchmarkCase*> by_id;
    for (const auto& c : cases) by_id[c.id] = &c;
    auto records = TranscriptStore(transcript).records();
    std::size_t changed = 0;
    std::string text;
    for (auto& r : records) {
        const auto it = by_id.find(r.case_id);
        if (it == by_id.end()) throw ManifestError(fmt::format("record for unknown case '{}'", r.case_id));
        const auto& c = *it->second;
        const auto g = grade_response(r.response, c.model, solve_reactions(c.model), c.required);
        if (!r.grade || grade_to_json(*r.grade) != grade_to_json(g)) ++changed;
        r.grade = g;
        text += record_to_json(r).dump() + "\n";
    }
    write_text_file(transcript, text);
    return changed;
}

namespace {

RunManifest read_manifest(const SessionPaths& paths) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(paths.manifest()));
    } catch (const nlohmann::json::parse_error& e) {
        throw ManifestError(fmt::format("{}: {}", paths.manifest().string(), e.what()));
    }
    return manifest_from_json(doc);
}

EvaluationReport finish(const RunManifest& manifest, const std::vector<BenchmarkCase>& cases,
                        const PromptAssets& assets, const TranscriptStore& store, const SessionPaths& paths) {
    auto report = evaluate(manifest, cases, assets, store);
    check_report(report);
    render_report(report, diagram_cases(cases), paths.report_dir());
    return report;
}

}  // namespace

EvaluationReport run_session(const RunManifest& manifest, const std::filesystem::path& out_dir,
                             std::shared_ptr<Backend> backend, const ProgressFn& progress) {
    const SessionPaths paths{out_dir};
    if (std::filesystem::exists(paths.manifest())) {
        const auto existing = read_manifest(paths);
        if (manifest_fingerprint(existing) != manifest_fingerprint(manifest))
            throw ManifestConflict(fmt::format("{} holds a run with a different manifest; use a new output directory",
                                               out_dir.string()));
    }
    write_text_file(paths.manifest(), manifest_to_json(manifest).dump(2) + "\n");

    const auto cases = resolve_cases(manifest.cases);
    const auto assets = assets_for(manifest);
    if (!backend) backend = make_backend(manifest, cases);
    TranscriptStore store(paths.transcript());
    execute_runs(manifest, cases, assets, *backend, store, progress);
    return finish(manifest, cases, assets, store, paths);
}

EvaluationReport render_session(const std::filesystem::path& out_dir) {
    const SessionPaths paths{out_dir};
    const auto manifest = read_manifest(paths);
    const auto cases = resolve_cases(manifest.cases);
    const TranscriptStore store(paths.transcript());
    return finish(manifest, cases, assets_for(manifest), store, paths);
}

}  // namespace beameval
