#pragma once

#include <string>
#include <vector>

#include "beameval/model.hpp"

namespace beameval {

/// One polynomial piece between consecutive breakpoints; t = x - x0.
///   shear(t)  = shear0 + q * t
///   moment(t) = moment0 + shear0 * t + q * t^2 / 2
/// Sagging moments are positive; shear is the sum of upward forces to the
/// left of the section.
struct DiagramPiece {
    double x0 = 0.0;
    double x1 = 0.0;
    double q = 0.0;  ///< net distributed intensity, up positive
    double shear0 = 0.0;
    double moment0 = 0.0;
    double axial = 0.0;

    double shear(double x) const { return shear0 + q * (x - x0); }
    double moment(double x) const {
        const double t = x - x0;
        return moment0 + shear0 * t + 0.5 * q * t * t;
    }
};

struct DiagramSample {
    double x_m = 0.0;
    double axial_kN = 0.0;
    double shear_kN = 0.0;
    double moment_kNm = 0.0;
};

struct DiagramSet {
    double span_m = 0.0;
    std::vector<DiagramPiece> pieces;
    std::vector<DiagramSample> samples;
    double shear_after_end = 0.0;   ///< V at span+, zero for a balanced beam
    double moment_after_end = 0.0;

    /// Value from the piece containing x; at an interior breakpoint the piece
    /// to the right wins unless `from_left` is set.
    double shear_at(double x, bool from_left = false) const;
    double moment_at(double x, bool from_left = false) const;

    /// Position and value of the largest |moment| over all pieces.
    std::pair<double, double> peak_moment() const;

private:
    const DiagramPiece& piece_at(double x, bool from_left) const;
};

/// Axial, shear and moment diagrams from the oracle reactions. Each piece is
/// sampled at `samples_per_piece` evenly spaced points including both ends
/// (minimum 2), so jumps show up as repeated x values.
DiagramSet diagrams(const BeamModel& model, int samples_per_piece = 21);

/// Whitespace-separated columns: x_m axial_kN shear_kN moment_kNm.
std::string export_columns(const DiagramSet& set);

/// Beam schematic plus axial, shear and moment plots as one SVG document.
std::string render_diagram_svg(const BeamModel& model, const DiagramSet& set);

}  // namespace beameval
