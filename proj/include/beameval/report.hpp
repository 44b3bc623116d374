#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "beameval/benchmark.hpp"
#include "beameval/metrics.hpp"

namespace beameval {

/// One row per (config, case): counts, reliability and error-class counts.
std::string render_cases_csv(const EvaluationReport& report);

/// One row per (config, family series) with the reliabilities in order and
/// the robustness.
std::string render_series_csv(const EvaluationReport& report);

/// Ablation layout: a row per prompt config, a reliability column per task
/// of `family` and a robustness column. Values to 3 decimals, "--" when
/// undefined.
std::string render_ablation_csv(const EvaluationReport& report, const std::string& family = "EXT");
std::string render_ablation_table(const EvaluationReport& report, const std::string& family = "EXT");

/// Reliability against load position, one panel per sweep family and one
/// line per config.
std::string render_curves_svg(const EvaluationReport& report);

/// Writes report.json, cases.csv and series.csv, plus curves.svg when the
/// report has sweep series, ablation.csv/ablation.txt for an ablation
/// report, and oracle diagrams (diagrams/<case>.svg and .txt) for
/// `diagram_cases`. Returns the written paths. Throws IoError.
std::vector<std::filesystem::path> render_report(const EvaluationReport& report,
                                                 const std::vector<BenchmarkCase>& diagram_cases,
                                                 const std::filesystem::path& out_dir);

}  // namespace beameval
