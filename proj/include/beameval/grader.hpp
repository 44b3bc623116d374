#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "beameval/backend.hpp"
#include "beameval/benchmark.hpp"
#include "beameval/model.hpp"

namespace beameval {

enum class ErrorClass {
    WrongMagnitude,
    WrongDirection,
    MissingComponent,
    ExtraSupport,
    LoadMisapplication,
    ExecutionFailure,
    ParseFailure,
    EquilibriumViolation,
};

const char* to_string(ErrorClass c);
std::optional<ErrorClass> parse_error_class(std::string_view text);

/// An answer normalized to the problem's frame and units (kN, kN*m).
struct ParsedAnswer {
    ReactionSet reactions;
    /// Reported reactions at supports the problem does not have ("x = 7.5 m",
    /// "label C").
    std::vector<std::string> extra_supports;
    /// Model the answer was computed on, when it came with one.
    std::optional<BeamModel> model_document;
};

struct AnswerParseFailure {
    ErrorClass error_class = ErrorClass::ParseFailure;  ///< ParseFailure or MissingComponent
    std::string detail;
};

using AnswerParse = std::variant<ParsedAnswer, AnswerParseFailure>;

/// Accepts, in order of preference: the response's structured answer, a
/// result block (delimiter line then JSON) inside raw_text, or text lines
/// such as "R_A = 6 kN downward" / "M_A = 340 kN·m counterclockwise".
/// Entries in N or N*m are converted. For text, the last statement of each
/// component wins.
AnswerParse parse_answer(const BackendResponse& response, const BeamModel& model,
                         const RequiredOutputs& required = {});

/// Parses a result document {"reactions": [{"position"|"pos", "V", "H"?,
/// "M"?}], "units"?: "kN"|"N", "model"?: {...}}.
AnswerParse parse_payload(const nlohmann::json& payload, const BeamModel& model, const RequiredOutputs& required = {});

AnswerParse parse_text_answer(std::string_view text, const BeamModel& model, const RequiredOutputs& required = {});

struct GradeOptions {
    double absolute_tolerance = 1e-6;   ///< kN or kN*m
    double relative_tolerance = 1e-3;   ///< fraction of |oracle|
    double position_tolerance_m = 1e-6;
};

struct ComponentDelta {
    std::size_t support_index = 0;
    char component = 'V';  ///< 'V', 'H' or 'M'
    double answer = 0.0;
    double oracle = 0.0;
    bool ok = false;
};

struct Grade {
    bool correct = false;
    std::optional<ErrorClass> error_class;
    std::vector<ComponentDelta> deltas;
    std::string detail;
};

/// Compares every required component. Correct when |answer - oracle| <=
/// max(abs_tol, rel_tol * |oracle|) and, for oracle values above that
/// tolerance, the signs agree. Error classes follow the priority
/// parse/execution > extra support > load misapplication > equilibrium >
/// missing > direction > magnitude.
Grade grade(const ParsedAnswer& answer, const ReactionSet& oracle, const BeamModel& model,
            const RequiredOutputs& required = {}, const GradeOptions& options = {});

Grade grade(const ReactionSet& answer, const ReactionSet& oracle, const BeamModel& model,
            const RequiredOutputs& required = {}, const GradeOptions& options = {});

/// Full path for one backend response: failures grade as execution
/// failures, otherwise parse_answer then grade against the oracle.
Grade grade_response(const BackendResponse& response, const BeamModel& model, const ReactionSet& oracle,
                     const RequiredOutputs& required = {}, const GradeOptions& options = {});

nlohmann::ordered_json grade_to_json(const Grade& grade);
Grade grade_from_json(const nlohmann::json& doc);

}  // namespace beameval
