#include "beameval/svg.hpp"

#include <fmt/format.h>

namespace beameval::svg {

namespace {
std::string num(double v) {
    auto s = fmt::format("{:.2f}", v);
    if (s == "-0.00") s = "0.00";
    return s;
}
}  // namespace

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                    double width, const std::string& dash) {
    body_ += fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="{}")",
                         num(x1), num(y1), num(x2), num(y2), stroke, num(width));
    if (!dash.empty()) body_ += fmt::format(R"( stroke-dasharray="{}")", dash);
    body_ += "/>\n";
}

void Document::rect(double x, double y, double w, double h, const std::string& fill,
                    const std::string& stroke) {
    body_ += fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="{}"/>)",
                         num(x), num(y), num(w), num(h), fill, stroke);
    body_ += "\n";
}

void Document::polyline(const std::vector<std::pair<double, double>>& pts,
                        const std::string& stroke, double width, const std::string& fill) {
    std::string points;
    for (const auto& [x, y] : pts) {
        if (!points.empty()) points += ' ';
        points += num(x) + "," + num(y);
    }
    body_ += fmt::format(R"(<polyline points="{}" fill="{}" stroke="{}" stroke-width="{}"/>)",
                         points, fill, stroke, num(width));
    body_ += "\n";
}

void Document::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += fmt::format(R"(<circle cx="{}" cy="{}" r="{}" fill="{}"/>)", num(cx), num(cy), num(r),
                         fill);
    body_ += "\n";
}

void Document::text(double x, double y, const std::string& content, double size,
                    const std::string& anchor) {
    body_ += fmt::format(
        R"(<text x="{}" y="{}" font-family="sans-serif" font-size="{}" text-anchor="{}">{}</text>)",
        num(x), num(y), num(size), anchor, escape(content));
    body_ += "\n";
}

std::string Document::str() const {
    return fmt::format(
               R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)",
               num(width_), num(height_), num(width_), num(height_)) +
           "\n" + R"(<rect x="0" y="0" width="100%" height="100%" fill="white"/>)" + "\n" + body_ +
           "</svg>\n";
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace beameval::svg
