#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "beameval/model.hpp"

namespace beameval {

/// Problem-document parse failure. `field` is a JSON-path-like locus
/// ("loads[1].start_m"); `line` is 1-based and 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, std::size_t line, const std::string& what);

    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

/// Canonical problem document: fixed key order, two-space indentation,
/// trailing newline, loads in the model's order. Throws ValidationError when
/// the model does not validate.
std::string serialize_problem(const BeamModel& model);

/// Inverse of serialize_problem. Checks structure and types only; call
/// validate() for the physical invariants.
BeamModel parse_problem(std::string_view text);

/// parse_problem followed by validate().
BeamModel load_problem(std::string_view text);

/// JSON form of a model without validation (used for model-documents,
/// which may legitimately be indeterminate).
nlohmann::ordered_json model_to_json(const BeamModel& model);

/// Structural decode of a model object; `path` prefixes field loci.
BeamModel model_from_json(const nlohmann::json& doc, const std::string& path = "");

nlohmann::ordered_json reactions_to_json(const ReactionSet& reactions, const BeamModel& model);

}  // namespace beameval
