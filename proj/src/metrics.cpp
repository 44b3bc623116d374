#include "beameval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace beameval {

Fraction reliability(std::uint64_t correct, std::uint64_t total) {
    if (total == 0) throw ZeroTotal();
    if (correct > total) throw std::invalid_argument(fmt::format("{} correct out of {} runs", correct, total));
    return {correct, total};
}

std::optional<double> robustness(const std::vector<double>& series) {
    if (series.size() < 2) throw std::invalid_argument("robustness needs at least two reliabilities");
    const double n = static_cast<double>(series.size());
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
    if (mean == 0.0) return std::nullopt;
    if (std::all_of(series.begin(), series.end(), [&](double r) { return r == series.front(); })) return 1.0;
    double ss = 0.0;
    for (double r : series) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return 1.0 / (1.0 + sd / mean);
}

std::optional<double> robustness(const std::vector<Fraction>& series) {
    std::vector<double> v;
    v.reserve(series.size());
    for (const auto& f : series) v.push_back(f.value());
    return robustness(v);
}

std::string format_metric(std::optional<double> v) { return v ? fmt::format("{:.3f}", *v) : "--"; }

const CaseResult* EvaluationReport::find(const std::string& config_name, const std::string& case_id) const {
    for (const auto& c : cases)
        if (c.config_name == config_name && c.case_id == case_id) return &c;
    return nullptr;
}

std::map<ErrorClass, std::uint64_t> EvaluationReport::error_histogram(const std::string& config_name) const {
    std::map<ErrorClass, std::uint64_t> h;
    for (const auto& c : cases)
        if (c.config_name == config_name)
            for (const auto& [k, n] : c.errors) h[k] += n;
    return h;
}

EvaluationReport aggregate(const std::vector<RunRecord>& records, const std::vector<CaseInfo>& cases,
                           const std::vector<PromptConfig>& configs, std::uint64_t n_total, std::string kind) {
    EvaluationReport report;
    report.kind = std::move(kind);
    report.n_total = n_total;
    report.configs = configs;

    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& cfg : configs)
        for (const auto& c : cases) {
            index[{cfg.name, c.id}] = report.cases.size();
            report.cases.push_back({cfg.name, c.id, c.family, c.position_m, {}, 0, 0, {}});
        }

    for (const auto& r : records) {
        const auto it = index.find({r.config_name, r.case_id});
        if (it == index.end()) continue;
        if (!r.grade)
            throw std::logic_error(fmt::format("record {} #{} ({}) has no grade", r.case_id, r.run_index, r.config_name));
        auto& c = report.cases[it->second];
        if (c.fingerprint.empty()) {
            c.fingerprint = r.fingerprint;
        } else if (c.fingerprint != r.fingerprint) {
            throw std::logic_error(fmt::format("records for {} under '{}' carry different prompt fingerprints",
                                               r.case_id, r.config_name));
        }
        ++c.total;
        ++report.records;
        if (r.grade->correct) {
            ++c.correct;
        } else if (r.grade->error_class) {
            ++c.errors[*r.grade->error_class];
        }
    }

    for (const auto& cfg : configs) {
        std::vector<SeriesResult> by_family;
        for (const auto& c : report.cases) {
            if (c.config_name != cfg.name) continue;
            auto s = std::find_if(by_family.begin(), by_family.end(), [&](const auto& x) { return x.family == c.family; });
            if (s == by_family.end()) {
                by_family.push_back({cfg.name, c.family, {}, {}, {}, std::nullopt});
                s = std::prev(by_family.end());
            }
            s->positions_m.push_back(c.position_m);
            s->case_ids.push_back(c.case_id);
            s->reliabilities.push_back(c.reliability());
        }
        for (auto& s : by_family) {
            const bool complete = std::all_of(s.reliabilities.begin(), s.reliabilities.end(),
                                              [](const Fraction& f) { return f.total > 0; });
            if (complete && s.reliabilities.size() >= 2) s.robustness = robustness(s.reliabilities);
            report.series.push_back(std::move(s));
        }
    }
    return report;
}

void check_report(const EvaluationReport& report) {
    std::uint64_t counted = 0;
    for (const auto& c : report.cases) {
        if (c.total != report.n_total)
            throw std::logic_error(fmt::format("{} under '{}' has {} of {} runs", c.case_id, c.config_name, c.total,
                                               report.n_total));
        std::uint64_t wrong = 0;
        for (const auto& [k, n] : c.errors) wrong += n;
        if (c.correct > c.total || c.correct + wrong != c.total)
            throw std::logic_error(fmt::format("{} under '{}': {} correct + {} classified errors != {} runs", c.case_id,
                                               c.config_name, c.correct, wrong, c.total));
        counted += c.total;
    }
    if (counted != report.records)
        throw std::logic_error(fmt::format("case counts sum to {} but {} records were folded", counted, report.records));
    for (const auto& s : report.series)
        if (s.robustness && !(*s.robustness > 0.0 && *s.robustness <= 1.0))
            throw std::logic_error(fmt::format("robustness {} of {} is outside (0, 1]", *s.robustness, s.family));
}

namespace {

nlohmann::ordered_json metric_json(std::optional<double> v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json errors_json(const std::map<ErrorClass, std::uint64_t>& errors) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [k, n] : errors) out[to_string(k)] = n;
    return out;
}

}  // namespace

nlohmann::ordered_json report_to_json(const EvaluationReport& report) {
    nlohmann::ordered_json doc;
    doc["kind"] = report.kind;
    doc["n_total"] = report.n_total;
    doc["records"] = report.records;
    doc["provenance"] = report.provenance;

    doc["configs"] = nlohmann::ordered_json::array();
    for (const auto& cfg : report.configs) {
        auto c = config_to_json(cfg);
        c["error_histogram"] = errors_json(report.error_histogram(cfg.name));
        doc["configs"].push_back(std::move(c));
    }

    doc["cases"] = nlohmann::ordered_json::array();
    for (const auto& c : report.cases) {
        nlohmann::ordered_json e;
        e["config"] = c.config_name;
        e["case_id"] = c.case_id;
        e["family"] = c.family;
        e["position_m"] = c.position_m;
        e["fingerprint"] = c.fingerprint;
        e["correct"] = c.correct;
        e["total"] = c.total;
        e["reliability"] = c.total ? nlohmann::ordered_json(c.reliability().value()) : nlohmann::ordered_json(nullptr);
        e["errors"] = errors_json(c.errors);
        doc["cases"].push_back(std::move(e));
    }

    doc["series"] = nlohmann::ordered_json::array();
    for (const auto& s : report.series) {
        nlohmann::ordered_json e;
        e["config"] = s.config_name;
        e["family"] = s.family;
        e["positions_m"] = s.positions_m;
        e["case_ids"] = s.case_ids;
        e["reliability"] = nlohmann::ordered_json::array();
        for (const auto& f : s.reliabilities)
            e["reliability"].push_back(f.total ? nlohmann::ordered_json(f.value()) : nlohmann::ordered_json(nullptr));
        e["robustness"] = metric_json(s.robustness);
        doc["series"].push_back(std::move(e));
    }
    return doc;
}

}  // namespace beameval
