#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beameval/backend.hpp"
#include "beameval/benchmark.hpp"
#include "beameval/metrics.hpp"
#include "beameval/mock.hpp"
#include "beameval/prompt.hpp"
#include "beameval/transcript.hpp"

namespace beameval {

/// Invalid manifest or command-line input.
struct ManifestError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An output directory already holds a run with a different manifest.
struct ManifestConflict : ManifestError {
    using ManifestError::ManifestError;
};

struct BackendSpec {
    std::string kind = "mock";  ///< mock, replay, chat or agent
    std::string endpoint;       ///< chat, agent
    std::string model;
    std::string api_key_env = "BEAMEVAL_API_KEY";  ///< name of the variable, never the key itself
    std::vector<std::string> sandbox_command;      ///< agent; empty means model documents only
    double script_timeout_s = 30.0;
    std::string transcript;  ///< replay source
    MockOptions mock;        ///< mock; its seed is taken from the manifest
};

/// Everything that determines an evaluation. Case sets:
///   "benchmark"            every sweep of every family
///   "representative"       one case per family
///   "extended"             the three extended tasks
///   "families:SS-I,OH-IV"  sweeps of the listed families
///   "problems:<dir>"       a tree written by write_problem_tree
struct RunManifest {
    std::string kind = "benchmark";  ///< benchmark, ablation or custom
    std::string cases = "benchmark";
    BackendSpec backend;
    std::vector<PromptConfig> configs = {proposed_config()};
    std::uint64_t n_total = 500;
    unsigned concurrency = 8;
    std::uint64_t seed = 0;
    SamplingParams params;
    std::string asset_dir;  ///< empty: default_asset_dir()
};

nlohmann::ordered_json mock_options_to_json(const MockOptions& options);
MockOptions mock_options_from_json(const nlohmann::json& doc);

nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& doc);

/// Hash of the manifest fields that affect results. Concurrency and the
/// asset directory path are excluded (asset text enters every prompt
/// fingerprint instead).
std::string manifest_fingerprint(const RunManifest& manifest);

std::vector<BenchmarkCase> resolve_cases(const std::string& spec);

std::shared_ptr<Backend> make_backend(const RunManifest& manifest, const std::vector<BenchmarkCase>& cases);

struct RunProgress {
    std::size_t planned = 0;  ///< invocations the manifest asks for
    std::size_t skipped = 0;  ///< already in the store
    std::size_t done = 0;     ///< completed in this session
};

using ProgressFn = std::function<void(const RunProgress&)>;

/// Runs every (config, case, run index) not yet in `store` on a pool of
/// manifest.concurrency workers, grading and appending each record as soon
/// as it returns. The first backend exception stops the pool (in-flight
/// invocations finish and are recorded) and is rethrown.
RunProgress execute_runs(const RunManifest& manifest, const std::vector<BenchmarkCase>& cases,
                         const PromptAssets& assets, Backend& backend, TranscriptStore& store,
                         const ProgressFn& progress = {});

/// Aggregates the store into a report with provenance (manifest,
/// fingerprint, asset version). Contains nothing time- or order-dependent.
EvaluationReport evaluate(const RunManifest& manifest, const std::vector<BenchmarkCase>& cases,
                          const PromptAssets& assets, const TranscriptStore& store);

/// Rewrites every record's grade with the current grader. Returns the
/// number of records whose grade changed.
std::size_t regrade_store(const std::vector<BenchmarkCase>& cases, const std::filesystem::path& transcript);

/// Output directory layout.
struct SessionPaths {
    std::filesystem::path root;
    std::filesystem::path manifest() const { return root / "manifest.json"; }
    std::filesystem::path transcript() const { return root / "transcript.jsonl"; }
    std::filesystem::path report_dir() const { return root / "report"; }
};

/// Writes or checks `manifest.json` (refusing a different fingerprint),
/// runs what is missing, then renders the report. `backend` overrides the
/// one the manifest describes.
EvaluationReport run_session(const RunManifest& manifest, const std::filesystem::path& out_dir,
                             std::shared_ptr<Backend> backend = nullptr, const ProgressFn& progress = {});

/// Re-renders the report of an existing output directory.
EvaluationReport render_session(const std::filesystem::path& out_dir);

}  // namespace beameval
