#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "beameval/backend.hpp"
#include "beameval/grader.hpp"

namespace beameval {

/// One backend invocation with everything needed to re-grade it.
struct RunRecord {
    std::string case_id;
    std::string fingerprint;
    std::string config_name;
    std::size_t run_index = 0;
    std::string backend;
    SamplingParams params;
    BackendResponse response;
    std::optional<Grade> grade;
    std::string started_at;   ///< UTC, ISO 8601
    std::string finished_at;
};

nlohmann::ordered_json record_to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& doc);

using RunKey = std::tuple<std::string, std::string, std::size_t>;  ///< (case, fingerprint, run)

inline RunKey key_of(const RunRecord& r) { return {r.case_id, r.fingerprint, r.run_index}; }

/// Append-only JSON-lines file. Opening an existing file loads its records;
/// a torn final line (a crash mid-write) is dropped and cut from the file.
/// Appends are serialized and flushed to disk before returning.
class TranscriptStore {
public:
    explicit TranscriptStore(std::filesystem::path path);

    const std::filesystem::path& path() const { return path_; }

    /// Throws std::logic_error when a record with the same key exists.
    void append(const RunRecord& record);

    bool contains(const RunKey& key) const;
    std::optional<RunRecord> find(const RunKey& key) const;
    std::vector<RunRecord> records() const;
    std::size_t size() const;

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::vector<RunRecord> records_;
    std::map<RunKey, std::size_t> index_;
};

/// UTC timestamp "2026-10-15T12:34:56.789Z".
std::string utc_now();

}  // namespace beameval
