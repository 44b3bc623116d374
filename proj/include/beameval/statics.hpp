#pragma once

#include <stdexcept>

#include "beameval/model.hpp"

namespace beameval {

class SingularConfiguration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed-form reactions of a statically determinate beam: a single fixed
/// support, or a pinned/roller pair solved by moment balance about each
/// support. Throws ValidationError for models that do not validate.
ReactionSet solve_reactions(const BeamModel& model);

struct EquilibriumResidual {
    double force_kN = 0.0;    ///< vertical sum of loads + reactions
    double horizontal_kN = 0.0;
    double moment_kNm = 0.0;  ///< ccw sum about x = 0
};

/// Residual of loads plus the given reactions. No validation; works for any
/// reaction set whose support indices are in range.
EquilibriumResidual equilibrium_residual(const BeamModel& model, const ReactionSet& reactions);

}  // namespace beameval
