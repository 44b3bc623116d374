#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beameval/grader.hpp"
#include "beameval/prompt.hpp"
#include "beameval/transcript.hpp"

namespace beameval {

struct ZeroTotal : std::invalid_argument {
    ZeroTotal() : std::invalid_argument("reliability of zero runs is undefined") {}
};

/// Exact correct/total. Compared by value, so 1/2 == 250/500.
struct Fraction {
    std::uint64_t correct = 0;
    std::uint64_t total = 0;

    double value() const { return static_cast<double>(correct) / static_cast<double>(total); }
    bool operator==(const Fraction& o) const {
        return static_cast<unsigned __int128>(correct) * o.total == static_cast<unsigned __int128>(o.correct) * total;
    }
};

/// Proportion of correct responses. Throws ZeroTotal for total 0 and
/// invalid_argument when correct exceeds total.
Fraction reliability(std::uint64_t correct, std::uint64_t total);

/// (1 + s/mean)^-1 with s the sample standard deviation. nullopt when the
/// mean is zero. Needs at least two values.
std::optional<double> robustness(const std::vector<double>& series);
std::optional<double> robustness(const std::vector<Fraction>& series);

/// Three decimals, or "--" for an undefined value.
std::string format_metric(std::optional<double> v);

struct CaseResult {
    std::string config_name;
    std::string case_id;
    std::string family;
    double position_m = 0.0;
    std::string fingerprint;
    std::uint64_t correct = 0;
    std::uint64_t total = 0;
    std::map<ErrorClass, std::uint64_t> errors;

    Fraction reliability() const { return {correct, total}; }
};

/// Reliability across the cases of one family (a load-position sweep, or the
/// extended tasks) under one prompt config.
struct SeriesResult {
    std::string config_name;
    std::string family;
    std::vector<double> positions_m;
    std::vector<std::string> case_ids;
    std::vector<Fraction> reliabilities;
    std::optional<double> robustness;
};

struct EvaluationReport {
    std::string kind;  ///< "benchmark", "ablation" or "custom"
    std::uint64_t n_total = 0;
    nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
    std::vector<PromptConfig> configs;
    std::vector<CaseResult> cases;  ///< configs order, then case order
    std::vector<SeriesResult> series;
    std::uint64_t records = 0;

    const CaseResult* find(const std::string& config_name, const std::string& case_id) const;
    std::map<ErrorClass, std::uint64_t> error_histogram(const std::string& config_name) const;
};

/// Case metadata the aggregation needs.
struct CaseInfo {
    std::string id;
    std::string family;
    double position_m = 0.0;
};

/// Folds graded records into per-case counts. Only records whose
/// (config, case) pair is listed are counted; records without a grade throw.
/// Counting is commutative, so record order does not matter.
EvaluationReport aggregate(const std::vector<RunRecord>& records, const std::vector<CaseInfo>& cases,
                           const std::vector<PromptConfig>& configs, std::uint64_t n_total, std::string kind);

/// Checks the report invariants (0 <= R <= 1, every case complete, counts
/// reconcile). Throws std::logic_error describing the first violation.
void check_report(const EvaluationReport& report);

nlohmann::ordered_json report_to_json(const EvaluationReport& report);

}  // namespace beameval
