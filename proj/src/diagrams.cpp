#include "beameval/diagrams.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "beameval/statics.hpp"
#include "beameval/svg.hpp"

namespace beameval {

const DiagramPiece& DiagramSet::piece_at(double x, bool from_left) const {
    if (pieces.empty()) throw std::logic_error("empty diagram");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& p = pieces[i];
        if (from_left ? (x > p.x0 && x <= p.x1) : (x >= p.x0 && x < p.x1)) return p;
    }
    return x <= pieces.front().x0 ? pieces.front() : pieces.back();
}

double DiagramSet::shear_at(double x, bool from_left) const { return piece_at(x, from_left).shear(x); }

double DiagramSet::moment_at(double x, bool from_left) const {
    return piece_at(x, from_left).moment(x);
}

std::pair<double, double> DiagramSet::peak_moment() const {
    std::pair<double, double> best{0.0, 0.0};
    auto consider = [&](double x, double m) {
        if (std::abs(m) > std::abs(best.second)) best = {x, m};
    };
    for (const auto& p : pieces) {
        consider(p.x0, p.moment(p.x0));
        consider(p.x1, p.moment(p.x1));
        // interior extremum where shear crosses zero
        if (p.q != 0.0) {
            const double x = p.x0 - p.shear0 / p.q;
            if (x > p.x0 && x < p.x1) consider(x, p.moment(x));
        }
    }
    return best;
}

DiagramSet diagrams(const BeamModel& model, int samples_per_piece) {
    const auto reactions = solve_reactions(model);
    samples_per_piece = std::max(samples_per_piece, 2);

    std::vector<double> breaks{0.0, model.span_m};
    for (const auto& s : model.supports) breaks.push_back(s.position_m);
    for (const auto& l : model.loads) {
        breaks.push_back(load_start(l));
        breaks.push_back(load_end(l));
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    // Concentrated forces and couples acting at each breakpoint.
    auto jumps_at = [&](double x) {
        double force = 0.0;
        double couple = 0.0;
        for (const auto& l : model.loads)
            if (const auto* p = std::get_if<PointLoad>(&l); p && p->position_m == x)
                force += sign_of(p->direction) * p->magnitude_kN;
        for (const auto& r : reactions.entries) {
            if (model.supports[r.support_index].position_m != x) continue;
            force += r.vertical_kN;
            if (r.moment_kNm) couple += *r.moment_kNm;
        }
        return std::pair{force, couple};
    };

    DiagramSet set;
    set.span_m = model.span_m;
    double shear = 0.0;
    double moment = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double x0 = breaks[k];
        const double x1 = breaks[k + 1];
        const auto [force, couple] = jumps_at(x0);
        shear += force;
        moment -= couple;

        double q = 0.0;
        for (const auto& l : model.loads)
            if (const auto* u = std::get_if<DistributedLoad>(&l); u && u->start_m <= x0 && u->end_m >= x1)
                q += sign_of(u->direction) * u->intensity_kN_per_m;

        DiagramPiece piece{x0, x1, q, shear, moment, 0.0};
        set.pieces.push_back(piece);
        for (int i = 0; i < samples_per_piece; ++i) {
            const double x = i + 1 == samples_per_piece
                                 ? x1
                                 : x0 + (x1 - x0) * static_cast<double>(i) / (samples_per_piece - 1);
            set.samples.push_back({x, 0.0, piece.shear(x), piece.moment(x)});
        }
        shear = piece.shear(x1);
        moment = piece.moment(x1);
    }
    const auto [force, couple] = jumps_at(model.span_m);
    set.shear_after_end = shear + force;
    set.moment_after_end = moment - couple;
    return set;
}

std::string export_columns(const DiagramSet& set) {
    std::string out = "# x_m axial_kN shear_kN moment_kNm\n";
    auto clean = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
    for (const auto& s : set.samples)
        out += fmt::format("{:.6f} {:.9g} {:.9g} {:.9g}\n", s.x_m, clean(s.axial_kN),
                           clean(s.shear_kN), clean(s.moment_kNm));
    return out;
}

namespace {

void plot_panel(svg::Document& doc, const DiagramSet& set, double top, double height,
                const std::string& title, const std::string& colour,
                double (*value)(const DiagramSample&)) {
    const double left = 70.0;
    const double right = 590.0;
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& s : set.samples) {
        lo = std::min(lo, value(s));
        hi = std::max(hi, value(s));
    }
    if (hi - lo < 1e-9) {
        hi += 1.0;
        lo -= 1.0;
    }
    const svg::Scale sx{0.0, set.span_m, left, right};
    const svg::Scale sy{lo, hi, top + height, top};

    doc.text(10, top + height / 2, title, 11);
    doc.line(left, sy(0.0), right, sy(0.0), "#444");
    std::vector<std::pair<double, double>> pts{{sx(0.0), sy(0.0)}};
    for (const auto& s : set.samples) pts.emplace_back(sx(s.x_m), sy(value(s)));
    pts.emplace_back(sx(set.span_m), sy(0.0));
    doc.polyline(pts, colour, 1.5, "none");
    doc.text(right + 5, sy(hi) + 4, fmt::format("{:.3g}", hi), 9);
    doc.text(right + 5, sy(lo) + 4, fmt::format("{:.3g}", lo), 9);
}

}  // namespace

std::string render_diagram_svg(const BeamModel& model, const DiagramSet& set) {
    svg::Document doc(640, 520);
    const svg::Scale sx{0.0, model.span_m, 70.0, 590.0};

    doc.text(320, 20, model.id, 13, "middle");
    const double beam_y = 70.0;
    doc.line(sx(0.0), beam_y, sx(model.span_m), beam_y, "#000", 4.0);
    for (std::size_t i = 0; i < model.supports.size(); ++i) {
        const auto& s = model.supports[i];
        const double x = sx(s.position_m);
        if (s.kind == SupportKind::Fixed) {
            doc.rect(x - 4, beam_y - 20, 8, 40, "#888");
        } else {
            doc.polyline({{x, beam_y + 2}, {x - 9, beam_y + 16}, {x + 9, beam_y + 16}, {x, beam_y + 2}},
                         "#000", 1.0, s.kind == SupportKind::Pinned ? "#888" : "white");
            if (s.kind == SupportKind::Roller) doc.line(x - 10, beam_y + 20, x + 10, beam_y + 20, "#000");
        }
        doc.text(x, beam_y + 34, support_label(i), 10, "middle");
    }
    for (const auto& l : model.loads) {
        if (const auto* p = std::get_if<PointLoad>(&l)) {
            const double x = sx(p->position_m);
            const double tip = p->direction == Direction::Down ? beam_y - 2 : beam_y + 2;
            const double tail = p->direction == Direction::Down ? beam_y - 30 : beam_y + 30;
            doc.line(x, tail, x, tip, "#c00", 2.0);
            doc.text(x + 4, tail, format_number(p->magnitude_kN) + " kN", 9);
        } else {
            const auto& u = std::get<DistributedLoad>(l);
            const double y = u.direction == Direction::Down ? beam_y - 18 : beam_y + 18;
            doc.rect(sx(u.start_m), std::min(y, beam_y), sx(u.end_m) - sx(u.start_m),
                     std::abs(y - beam_y), "#f4c0c0", "#c00");
            doc.text(sx(u.start_m), y - 4, format_number(u.intensity_kN_per_m) + " kN/m", 9);
        }
    }

    plot_panel(doc, set, 120, 100, "Axial (kN)", "#2a7",
               [](const DiagramSample& s) { return s.axial_kN; });
    plot_panel(doc, set, 250, 100, "Shear (kN)", "#27c",
               [](const DiagramSample& s) { return s.shear_kN; });
    plot_panel(doc, set, 380, 100, "Moment (kN*m)", "#c52",
               [](const DiagramSample& s) { return s.moment_kNm; });
    doc.text(330, 510, "x (m)", 10, "middle");
    return doc.str();
}

}  // namespace beameval
