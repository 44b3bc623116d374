#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "beameval/model.hpp"

namespace beameval {

enum class BeamType { SimplySupported, Overhang };

/// I: point load. II: 1 m udl. III: point load plus full-span udl.
/// IV: point load plus 1 m udl.
enum class LoadCondition { I, II, III, IV };

struct Family {
    BeamType beam = BeamType::SimplySupported;
    LoadCondition condition = LoadCondition::I;

    bool operator==(const Family&) const = default;

    /// "SS-I", "OH-IV", ...
    std::string id() const;
};

/// The eight benchmark families, simply supported first.
std::vector<Family> families();
std::optional<Family> parse_family(std::string_view id);

/// How condition IV moves along the beam. CoMoving shifts the 1 m udl with
/// the point load sitting at its middle; PointMoving keeps the udl anchored
/// and moves only the point load.
enum class SweepMode { CoMoving, PointMoving };

struct BenchmarkOptions {
    double span_m = 10.0;
    double overhang_roller_m = 5.0;
    double point_kN = 10.0;
    double udl_kN_per_m = 10.0;
    double udl_length_m = 1.0;
    double step_m = 1.0;
    SweepMode iv_mode = SweepMode::CoMoving;
    double iv_anchor_start_m = 4.0;
    double base_position_m = 4.0;  ///< where generate_benchmark() puts the moving load
};

/// Which reaction components an answer must report. Vertical reactions are
/// always required.
struct RequiredOutputs {
    bool horizontal = false;
    bool moment = false;

    bool operator==(const RequiredOutputs&) const = default;
};

/// Moments are required whenever a fixed support is present.
RequiredOutputs default_required_outputs(const BeamModel& model);

struct BenchmarkCase {
    std::string id;       ///< "SS-I@4", "EXT-a"
    std::string family;   ///< family id, or "EXT" for extended tasks
    double position_m = 0.0;  ///< moving-load position (udl start for II and co-moving IV)
    BeamModel model;
    RequiredOutputs required;
};

/// Model of one family with its moving load at `position_m`.
BeamModel family_model(const Family& family, double position_m, const BenchmarkOptions& options = {});

/// One representative case per family, moving load at base_position_m.
std::vector<BenchmarkCase> generate_benchmark(const BenchmarkOptions& options = {});

/// Positions descend from the right end in step_m increments. Point loads
/// visit both ends; a udl stays on the span.
std::vector<BenchmarkCase> generate_sweep(const Family& family, const BenchmarkOptions& options = {});

/// Every sweep of every family, in families() order.
std::vector<BenchmarkCase> generate_all_sweeps(const BenchmarkOptions& options = {});

struct ExtendedOptions {
    double point_kN = 10.0;
    double udl_kN_per_m = 10.0;
};

/// EXT-a: overhang with upward point and udl. EXT-b: overhang with the
/// roller at 7 m. EXT-c: cantilever, fixed-end moment required.
std::vector<BenchmarkCase> extended_tasks(const ExtendedOptions& options = {});

/// Natural-language statement: geometry, supports, loads and the requested
/// outputs, in a fixed template.
std::string render_problem_text(const BeamModel& model, const RequiredOutputs& required);

/// Manifest entry per case: id, family, position, problem file, required
/// outputs and the oracle reactions.
nlohmann::ordered_json benchmark_manifest(const std::vector<BenchmarkCase>& cases);

/// Writes `problems/<id>.json` for every case plus `manifest.json` under
/// `dir`. Returns the manifest.
nlohmann::ordered_json write_problem_tree(const std::filesystem::path& dir,
                                          const std::vector<BenchmarkCase>& cases);

/// Reads a manifest back into cases (problem documents resolved relative to
/// the manifest's directory).
std::vector<BenchmarkCase> read_problem_tree(const std::filesystem::path& dir);

/// Safe file stem for a case id ('@' kept, path separators replaced).
std::string case_file_stem(std::string_view id);

}  // namespace beameval
