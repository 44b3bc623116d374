#include "beameval/model.hpp"

#include <cmath>

#include <fmt/format.h>

namespace beameval {

const char* to_string(SupportKind kind) {
    switch (kind) {
        case SupportKind::Pinned: return "pinned";
        case SupportKind::Roller: return "roller";
        case SupportKind::Fixed: return "fixed";
    }
    return "?";
}

const char* to_string(Direction dir) { return dir == Direction::Up ? "up" : "down"; }

const char* to_string(ValidationErrorKind kind) {
    switch (kind) {
        case ValidationErrorKind::OutOfBounds: return "OutOfBounds";
        case ValidationErrorKind::DuplicateSupport: return "DuplicateSupport";
        case ValidationErrorKind::Indeterminate: return "Indeterminate";
        case ValidationErrorKind::Unstable: return "Unstable";
        case ValidationErrorKind::EmptyLoads: return "EmptyLoads";
        case ValidationErrorKind::InvalidLoad: return "InvalidLoad";
        case ValidationErrorKind::InvalidSpan: return "InvalidSpan";
    }
    return "?";
}

std::optional<SupportKind> parse_support_kind(std::string_view text) {
    if (text == "pinned") return SupportKind::Pinned;
    if (text == "roller") return SupportKind::Roller;
    if (text == "fixed") return SupportKind::Fixed;
    return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view text) {
    if (text == "up") return Direction::Up;
    if (text == "down") return Direction::Down;
    return std::nullopt;
}

int reaction_components(SupportKind kind) {
    switch (kind) {
        case SupportKind::Roller: return 1;
        case SupportKind::Pinned: return 2;
        case SupportKind::Fixed: return 3;
    }
    return 0;
}

int reaction_components(const BeamModel& model) {
    int n = 0;
    for (const auto& s : model.supports) n += reaction_components(s.kind);
    return n;
}

namespace {

bool in_span(double x, double span) { return std::isfinite(x) && x >= 0.0 && x <= span; }

ValidationError error(ValidationErrorKind kind, const std::string& msg) { return {kind, msg}; }

}  // namespace

std::optional<ValidationError> check_geometry(const BeamModel& model) {
    if (!std::isfinite(model.span_m) || model.span_m <= 0.0)
        return error(ValidationErrorKind::InvalidSpan, "span_m must be positive");

    for (std::size_t i = 0; i < model.supports.size(); ++i) {
        const auto& s = model.supports[i];
        if (!in_span(s.position_m, model.span_m))
            return error(ValidationErrorKind::OutOfBounds,
                         fmt::format("support {} at {} m lies outside [0, {}]", i,
                                     format_number(s.position_m), format_number(model.span_m)));
        if (i > 0) {
            const double prev = model.supports[i - 1].position_m;
            if (s.position_m == prev)
                return error(ValidationErrorKind::DuplicateSupport,
                             fmt::format("two supports at {} m", format_number(s.position_m)));
            if (s.position_m < prev)
                return error(ValidationErrorKind::OutOfBounds,
                             "support positions must be strictly increasing");
        }
    }

    if (model.loads.empty()) return error(ValidationErrorKind::EmptyLoads, "model has no loads");

    for (std::size_t i = 0; i < model.loads.size(); ++i) {
        if (const auto* p = std::get_if<PointLoad>(&model.loads[i])) {
            if (!std::isfinite(p->magnitude_kN) || p->magnitude_kN <= 0.0)
                return error(ValidationErrorKind::InvalidLoad,
                             fmt::format("load {}: magnitude must be positive", i));
            if (!in_span(p->position_m, model.span_m))
                return error(ValidationErrorKind::OutOfBounds,
                             fmt::format("load {}: position {} m off the beam", i,
                                         format_number(p->position_m)));
        } else {
            const auto& u = std::get<DistributedLoad>(model.loads[i]);
            if (!std::isfinite(u.intensity_kN_per_m) || u.intensity_kN_per_m <= 0.0)
                return error(ValidationErrorKind::InvalidLoad,
                             fmt::format("load {}: intensity must be positive", i));
            if (!in_span(u.start_m, model.span_m) || !in_span(u.end_m, model.span_m))
                return error(ValidationErrorKind::OutOfBounds,
                             fmt::format("load {}: udl [{}, {}] off the beam", i,
                                         format_number(u.start_m), format_number(u.end_m)));
            if (!(u.start_m < u.end_m))
                return error(ValidationErrorKind::InvalidLoad,
                             fmt::format("load {}: udl start must be below end", i));
        }
    }
    return std::nullopt;
}

std::optional<ValidationError> check(const BeamModel& model) {
    if (auto err = check_geometry(model)) return err;

    const int components = reaction_components(model);
    if (components != 3)
        return error(ValidationErrorKind::Indeterminate,
                     fmt::format("{} reaction components (statically determinate needs 3)",
                                 components));

    // Three rollers: count is right but nothing restrains horizontal motion and
    // the vertical system has three unknowns for two equations.
    bool horizontal_restraint = false;
    for (const auto& s : model.supports)
        if (s.kind != SupportKind::Roller) horizontal_restraint = true;
    if (!horizontal_restraint)
        return error(ValidationErrorKind::Unstable, "no support restrains horizontal motion");

    return std::nullopt;
}

void validate(const BeamModel& model) {
    if (auto err = check(model)) throw *err;
}

Resultant resultant(const Load& load) {
    if (const auto* p = std::get_if<PointLoad>(&load))
        return {sign_of(p->direction) * p->magnitude_kN, p->position_m};
    const auto& u = std::get<DistributedLoad>(load);
    return {sign_of(u.direction) * u.intensity_kN_per_m * (u.end_m - u.start_m),
            0.5 * (u.start_m + u.end_m)};
}

Resultant resultant(const std::vector<Load>& loads) {
    double force = 0.0;
    double first_moment = 0.0;
    for (const auto& l : loads) {
        const auto r = resultant(l);
        force += r.force_kN;
        first_moment += r.force_kN * r.centroid_m;
    }
    return {force, force != 0.0 ? first_moment / force : 0.0};
}

double load_scale(const BeamModel& model) {
    double total = 0.0;
    for (const auto& l : model.loads) total += std::abs(resultant(l).force_kN);
    return total;
}

double moment_about(const Load& load, double pivot_m) {
    const auto r = resultant(load);
    return r.force_kN * (r.centroid_m - pivot_m);
}

double load_start(const Load& load) {
    if (const auto* p = std::get_if<PointLoad>(&load)) return p->position_m;
    return std::get<DistributedLoad>(load).start_m;
}

double load_end(const Load& load) {
    if (const auto* p = std::get_if<PointLoad>(&load)) return p->position_m;
    return std::get<DistributedLoad>(load).end_m;
}

std::string format_number(double value) {
    if (value == 0.0) return "0";  // folds -0
    return fmt::format("{}", value);
}

std::string support_label(std::size_t index) {
    std::string label;
    do {
        label.insert(label.begin(), static_cast<char>('A' + index % 26));
        index /= 26;
    } while (index-- > 0);
    return label;
}

}  // namespace beameval
