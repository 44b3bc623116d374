#pragma once

#include <string>
#include <utility>
#include <vector>

namespace beameval::svg {

/// Minimal SVG builder. Numbers are written with fixed precision so the
/// output is byte-stable.
class Document {
public:
    Document(double width, double height);

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, const std::string& dash = "");
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none");
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width = 1.5, const std::string& fill = "none");
    void circle(double cx, double cy, double r, const std::string& fill);
    void text(double x, double y, const std::string& content, double size = 11.0,
              const std::string& anchor = "start");

    std::string str() const;

private:
    double width_;
    double height_;
    std::string body_;
};

/// Linear map from a data interval onto a pixel interval.
struct Scale {
    double d0, d1, p0, p1;
    double operator()(double v) const {
        return d1 == d0 ? 0.5 * (p0 + p1) : p0 + (v - d0) * (p1 - p0) / (d1 - d0);
    }
};

std::string escape(const std::string& text);

}  // namespace beameval::svg
