#include "beameval/statics.hpp"

namespace beameval {

namespace {

Reaction blank_reaction(const Support& s, std::size_t index) {
    Reaction r;
    r.support_index = index;
    if (s.kind != SupportKind::Roller) r.horizontal_kN = 0.0;
    if (s.kind == SupportKind::Fixed) r.moment_kNm = 0.0;
    return r;
}

}  // namespace

ReactionSet solve_reactions(const BeamModel& model) {
    validate(model);

    ReactionSet out;
    for (std::size_t i = 0; i < model.supports.size(); ++i)
        out.entries.push_back(blank_reaction(model.supports[i], i));

    if (model.supports.size() == 1) {
        // Single fixed support: vertical force and couple balance everything.
        const double a = model.supports[0].position_m;
        double force = 0.0;
        double moment = 0.0;
        for (const auto& l : model.loads) {
            force += resultant(l).force_kN;
            moment += moment_about(l, a);
        }
        out.entries[0].vertical_kN = -force;
        out.entries[0].moment_kNm = -moment;
        return out;
    }

    // Two vertical supports (pinned + roller, any order). Each reaction comes
    // from moment balance about the other support, so neither depends on the
    // other's rounding.
    const double a = model.supports[0].position_m;
    const double b = model.supports[1].position_m;
    if (a == b) throw SingularConfiguration("both vertical reactions act at the same point");

    double about_a = 0.0;
    double about_b = 0.0;
    for (const auto& l : model.loads) {
        about_a += moment_about(l, a);
        about_b += moment_about(l, b);
    }
    out.entries[0].vertical_kN = about_b / (b - a);
    out.entries[1].vertical_kN = -about_a / (b - a);
    return out;
}

EquilibriumResidual equilibrium_residual(const BeamModel& model, const ReactionSet& reactions) {
    EquilibriumResidual res;
    for (const auto& l : model.loads) {
        res.force_kN += resultant(l).force_kN;
        res.moment_kNm += moment_about(l, 0.0);
    }
    for (const auto& r : reactions.entries) {
        const double x = model.supports.at(r.support_index).position_m;
        res.force_kN += r.vertical_kN;
        res.moment_kNm += r.vertical_kN * x;
        if (r.horizontal_kN) res.horizontal_kN += *r.horizontal_kN;
        if (r.moment_kNm) res.moment_kNm += *r.moment_kNm;
    }
    return res;
}

}  // namespace beameval
