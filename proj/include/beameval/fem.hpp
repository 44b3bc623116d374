#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "beameval/model.hpp"

namespace beameval::fem {

/// Consistent units (kN, m). Defaults keep displacements well-conditioned;
/// determinate reactions do not depend on them.
struct SectionProperties {
    double E = 200e6;  ///< kN/m^2
    double A = 0.01;   ///< m^2
    double I = 1e-4;   ///< m^4

    bool operator==(const SectionProperties&) const = default;
};

struct MeshOverrides {
    std::vector<double> extra_nodes;
    std::optional<SectionProperties> section;

    bool operator==(const MeshOverrides&) const = default;
};

struct Element {
    std::size_t first = 0;
    std::size_t second = 0;
    SectionProperties section;
    double q = 0.0;  ///< distributed intensity over the whole element, up positive
};

/// Per-node restraint flags for the three planar DOFs (ux, uy, rz).
struct Constraint {
    std::size_t node = 0;
    std::size_t support_index = 0;
    bool ux = false;
    bool uy = false;
    bool rz = false;
};

struct NodalForce {
    std::size_t node = 0;
    double fy = 0.0;
};

struct MeshedBeam {
    double span_m = 0.0;
    std::vector<double> nodes;
    std::vector<Element> elements;
    std::vector<Constraint> constraints;
    std::vector<NodalForce> nodal_forces;
    std::size_t support_count = 0;
    std::vector<SupportKind> support_kinds;

    std::size_t node_at(double x) const;  ///< exact match, throws if absent
};

struct NodeDisplacement {
    double ux = 0.0;
    double uy = 0.0;
    double rz = 0.0;
};

struct Solution {
    ReactionSet reactions;
    std::vector<NodeDisplacement> displacements;
};

class SingularStiffness : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Breakpoint mesh: nodes at the beam ends, supports, point loads, udl
/// endpoints and any override nodes, sorted and deduplicated. Only geometric
/// validity is required, so indeterminate or unstable layouts mesh fine and
/// fail (or not) at solve time.
MeshedBeam mesh(const BeamModel& model, const MeshOverrides& overrides = {});

/// Direct stiffness solve with work-equivalent nodal loads for element udls.
/// Reactions are K*u - F at the restrained DOFs.
Solution solve(const MeshedBeam& mesh);

/// mesh + solve.
Solution analyze(const BeamModel& model, const MeshOverrides& overrides = {});

/// Model-document: a problem document plus an optional "mesh" object
/// {"extra_nodes": [...], "section": {"E": .., "A": .., "I": ..}}.
struct ModelDocument {
    BeamModel model;
    MeshOverrides overrides;
};

ModelDocument model_document_from_json(const nlohmann::json& doc);
ModelDocument parse_model_document(std::string_view text);
nlohmann::ordered_json model_document_to_json(const ModelDocument& doc);

}  // namespace beameval::fem
