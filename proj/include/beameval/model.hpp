#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace beameval {

// Global frame: x measured from the left end, upward forces positive,
// counterclockwise moments positive. Units are kN, m and kN*m throughout.

enum class SupportKind { Pinned, Roller, Fixed };
enum class Direction { Up, Down };

struct Support {
    SupportKind kind = SupportKind::Pinned;
    double position_m = 0.0;

    bool operator==(const Support&) const = default;
};

struct PointLoad {
    double magnitude_kN = 0.0;
    double position_m = 0.0;
    Direction direction = Direction::Down;

    bool operator==(const PointLoad&) const = default;
};

struct DistributedLoad {
    double intensity_kN_per_m = 0.0;
    double start_m = 0.0;
    double end_m = 0.0;
    Direction direction = Direction::Down;

    bool operator==(const DistributedLoad&) const = default;
};

using Load = std::variant<PointLoad, DistributedLoad>;

struct BeamModel {
    std::string id;
    double span_m = 0.0;
    std::vector<Support> supports;
    std::vector<Load> loads;

    bool operator==(const BeamModel&) const = default;
};

/// Reaction of one support. Only the components the support kind provides
/// are engaged: roller {V}, pinned {V, H}, fixed {V, H, M}.
struct Reaction {
    std::size_t support_index = 0;
    double vertical_kN = 0.0;
    std::optional<double> horizontal_kN;
    std::optional<double> moment_kNm;

    bool operator==(const Reaction&) const = default;
};

struct ReactionSet {
    std::vector<Reaction> entries;

    bool operator==(const ReactionSet&) const = default;
};

struct Resultant {
    double force_kN = 0.0;   ///< signed, up positive
    double centroid_m = 0.0;
};

enum class ValidationErrorKind {
    OutOfBounds,
    DuplicateSupport,
    Indeterminate,
    Unstable,
    EmptyLoads,
    InvalidLoad,
    InvalidSpan,
};

class ValidationError : public std::runtime_error {
public:
    ValidationError(ValidationErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ValidationErrorKind kind() const noexcept { return kind_; }

private:
    ValidationErrorKind kind_;
};

const char* to_string(SupportKind kind);
const char* to_string(Direction dir);
const char* to_string(ValidationErrorKind kind);
std::optional<SupportKind> parse_support_kind(std::string_view text);
std::optional<Direction> parse_direction(std::string_view text);

inline double sign_of(Direction dir) { return dir == Direction::Up ? 1.0 : -1.0; }

/// Number of reaction components a support provides.
int reaction_components(SupportKind kind);
int reaction_components(const BeamModel& model);

/// Geometric checks only (span, bounds, ordering, load sanity). Models that
/// pass may still be indeterminate; the FE solver accepts those.
std::optional<ValidationError> check_geometry(const BeamModel& model);

/// Full acceptance check: geometry plus static determinacy.
std::optional<ValidationError> check(const BeamModel& model);

/// Throws ValidationError when check() reports a violation.
void validate(const BeamModel& model);

Resultant resultant(const Load& load);

/// Sum of forces and force-weighted centroid. Centroid is 0 when the net
/// force vanishes.
Resultant resultant(const std::vector<Load>& loads);

/// Sum of |resultant force| over all loads; the natural scale for
/// equilibrium and comparison tolerances.
double load_scale(const BeamModel& model);

/// Moment of a load about x = pivot (ccw positive).
double moment_about(const Load& load, double pivot_m);

double load_start(const Load& load);
double load_end(const Load& load);

/// Shortest round-trip decimal text for a double ("4", "7.5", "0.1").
std::string format_number(double value);

/// "A", "B", ... used to label supports in order.
std::string support_label(std::size_t index);

}  // namespace beameval
