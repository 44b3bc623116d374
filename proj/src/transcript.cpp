#include "beameval/transcript.hpp"

#include <chrono>
#include <cstdio>
#include <stdexcept>

#include <fcntl.h>
#include <unistd.h>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "beameval/io.hpp"

namespace beameval {

nlohmann::ordered_json record_to_json(const RunRecord& r) {
    nlohmann::ordered_json j;
    j["case_id"] = r.case_id;
    j["fingerprint"] = r.fingerprint;
    j["config"] = r.config_name;
    j["run_index"] = r.run_index;
    j["backend"] = r.backend;
    j["params"] = params_to_json(r.params);
    j["response"] = response_to_json(r.response);
    j["grade"] = r.grade ? grade_to_json(*r.grade) : nlohmann::ordered_json(nullptr);
    j["started_at"] = r.started_at;
    j["finished_at"] = r.finished_at;
    return j;
}

RunRecord record_from_json(const nlohmann::json& doc) {
    RunRecord r;
    r.case_id = doc.at("case_id").get<std::string>();
    r.fingerprint = doc.at("fingerprint").get<std::string>();
    r.config_name = doc.value("config", std::string{});
    r.run_index = doc.at("run_index").get<std::size_t>();
    r.backend = doc.value("backend", std::string{});
    if (const auto p = doc.find("params"); p != doc.end() && p->is_object()) r.params = params_from_json(*p);
    r.response = response_from_json(doc.at("response"));
    if (const auto g = doc.find("grade"); g != doc.end() && g->is_object()) r.grade = grade_from_json(*g);
    r.started_at = doc.value("started_at", std::string{});
    r.finished_at = doc.value("finished_at", std::string{});
    return r;
}

TranscriptStore::TranscriptStore(std::filesystem::path path) : path_(std::move(path)) {
    if (!std::filesystem::exists(path_)) {
        write_text_file(path_, "");
        return;
    }
    const auto text = read_text_file(path_);
    std::size_t good_end = 0;
    std::size_t line_no = 0;
    for (std::size_t begin = 0; begin < text.size();) {
        const auto nl = text.find('\n', begin);
        ++line_no;
        if (nl == std::string::npos) break;  // torn final line
        const auto line = std::string_view(text).substr(begin, nl - begin);
        if (!line.empty()) {
            try {
                auto rec = record_from_json(nlohmann::json::parse(line));
                if (!index_.count(key_of(rec))) {
                    index_[key_of(rec)] = records_.size();
                    records_.push_back(std::move(rec));
                }
            } catch (const std::exception& e) {
                throw IoError(fmt::format("{}:{}: corrupt transcript record: {}", path_.string(), line_no, e.what()));
            }
        }
        begin = nl + 1;
        good_end = begin;
    }
    if (good_end != text.size()) {
        std::error_code ec;
        std::filesystem::resize_file(path_, good_end, ec);
        if (ec) throw IoError(fmt::format("cannot truncate {}: {}", path_.string(), ec.message()));
    }
}

void TranscriptStore::append(const RunRecord& record) {
    const auto line = record_to_json(record).dump() + "\n";
    std::lock_guard lock(mutex_);
    if (index_.count(key_of(record)))
        throw std::logic_error(fmt::format("duplicate transcript record {} run {}", record.case_id, record.run_index));

    const int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
    if (fd < 0) throw IoError(fmt::format("cannot open {}", path_.string()));
    std::size_t written = 0;
    while (written < line.size()) {
        const auto n = ::write(fd, line.data() + written, line.size() - written);
        if (n < 0) {
            ::close(fd);
            throw IoError(fmt::format("write failed: {}", path_.string()));
        }
        written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);

    index_[key_of(record)] = records_.size();
    records_.push_back(record);
}

bool TranscriptStore::contains(const RunKey& key) const {
    std::lock_guard lock(mutex_);
    return index_.count(key) > 0;
}

std::optional<RunRecord> TranscriptStore::find(const RunKey& key) const {
    std::lock_guard lock(mutex_);
    const auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return records_[it->second];
}

std::vector<RunRecord> TranscriptStore::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

std::size_t TranscriptStore::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    return fmt::format("{:%Y-%m-%dT%H:%M:%S}.{:03d}Z", fmt::gmtime(std::chrono::system_clock::to_time_t(now)), ms);
}

}  // namespace beameval
