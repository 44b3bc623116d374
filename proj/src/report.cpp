#include "beameval/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "beameval/diagrams.hpp"
#include "beameval/io.hpp"
#include "beameval/svg.hpp"

namespace beameval {

namespace {

const std::vector<ErrorClass> kAllErrors = {
    ErrorClass::WrongMagnitude,   ErrorClass::WrongDirection,     ErrorClass::MissingComponent,
    ErrorClass::ExtraSupport,     ErrorClass::LoadMisapplication, ErrorClass::ExecutionFailure,
    ErrorClass::ParseFailure,     ErrorClass::EquilibriumViolation,
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string fraction_text(const Fraction& f) { return f.total ? fmt::format("{:.3f}", f.value()) : "--"; }

std::vector<const SeriesResult*> series_of(const EvaluationReport& report, const std::string& family) {
    std::vector<const SeriesResult*> out;
    for (const auto& s : report.series)
        if (s.family == family) out.push_back(&s);
    return out;
}

std::vector<std::string> sweep_families(const EvaluationReport& report) {
    std::vector<std::string> out;
    for (const auto& s : report.series)
        if (s.family != "EXT" && s.family != "custom" && s.reliabilities.size() >= 2 &&
            std::find(out.begin(), out.end(), s.family) == out.end())
            out.push_back(s.family);
    return out;
}

}  // namespace

std::string render_cases_csv(const EvaluationReport& report) {
    std::string out = "config,case_id,family,position_m,correct,total,reliability";
    for (auto e : kAllErrors) out += fmt::format(",{}", to_string(e));
    out += '\n';
    for (const auto& c : report.cases) {
        out += fmt::format("{},{},{},{},{},{},{}", csv_field(c.config_name), csv_field(c.case_id), csv_field(c.family),
                           format_number(c.position_m), c.correct, c.total, fraction_text(c.reliability()));
        for (auto e : kAllErrors) {
            const auto it = c.errors.find(e);
            out += fmt::format(",{}", it == c.errors.end() ? 0 : it->second);
        }
        out += '\n';
    }
    return out;
}

std::string render_series_csv(const EvaluationReport& report) {
    std::string out = "config,family,cases,reliabilities,robustness\n";
    for (const auto& s : report.series) {
        std::vector<std::string> r;
        for (const auto& f : s.reliabilities) r.push_back(fraction_text(f));
        out += fmt::format("{},{},{},{},{}\n", csv_field(s.config_name), csv_field(s.family), s.case_ids.size(),
                           fmt::join(r, " "), format_metric(s.robustness));
    }
    return out;
}

std::string render_ablation_csv(const EvaluationReport& report, const std::string& family) {
    const auto rows = series_of(report, family);
    std::string out = "prompt_configuration";
    if (!rows.empty())
        for (const auto& id : rows.front()->case_ids) out += fmt::format(",reliability_{}", id);
    out += ",robustness\n";
    for (const auto* s : rows) {
        out += csv_field(s->config_name);
        for (const auto& f : s->reliabilities) out += "," + fraction_text(f);
        out += "," + format_metric(s->robustness) + "\n";
    }
    return out;
}

std::string render_ablation_table(const EvaluationReport& report, const std::string& family) {
    const auto rows = series_of(report, family);
    std::vector<std::string> header{"Prompt configuration"};
    if (!rows.empty())
        for (const auto& id : rows.front()->case_ids) header.push_back("Reliability: " + id);
    header.push_back("Robustness");

    std::vector<std::vector<std::string>> cells;
    for (const auto* s : rows) {
        std::vector<std::string> row{s->config_name};
        for (const auto& f : s->reliabilities) row.push_back(fraction_text(f));
        row.push_back(format_metric(s->robustness));
        cells.push_back(std::move(row));
    }

    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        width[i] = header[i].size();
        for (const auto& row : cells)
            if (i < row.size()) width[i] = std::max(width[i], row[i].size());
    }
    auto line = [&](const std::vector<std::string>& row) {
        std::string out;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += "  ";
            out += i == 0 ? fmt::format("{:<{}}", row[i], width[i]) : fmt::format("{:>{}}", row[i], width[i]);
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        return out + "\n";
    };
    std::string out = line(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    for (const auto& row : cells) out += line(row);
    return out;
}

std::string render_curves_svg(const EvaluationReport& report) {
    const auto families = sweep_families(report);
    const int cols = 4;
    const int rows = std::max(1, static_cast<int>((families.size() + cols - 1) / cols));
    const double pw = 260.0, ph = 200.0, top = 40.0;
    svg::Document doc(cols * pw + 20.0, rows * ph + top + 30.0 + 16.0 * static_cast<double>(report.configs.size()));
    doc.text((cols * pw + 20.0) / 2.0, 22.0, "Reliability against load position", 14, "middle");

    for (std::size_t f = 0; f < families.size(); ++f) {
        const double ox = 10.0 + static_cast<double>(f % cols) * pw;
        const double oy = top + static_cast<double>(f / cols) * ph;
        const auto panel = series_of(report, families[f]);

        double x_max = 10.0;
        for (const auto* s : panel)
            for (double p : s->positions_m) x_max = std::max(x_max, std::ceil(p));
        const svg::Scale sx{0.0, x_max, ox + 40.0, ox + pw - 15.0};
        const svg::Scale sy{0.0, 1.0, oy + ph - 40.0, oy + 25.0};

        doc.text(ox + pw / 2.0, oy + 14.0, families[f], 12, "middle");
        doc.rect(sx(0.0), sy(1.0), sx(x_max) - sx(0.0), sy(0.0) - sy(1.0), "none", "#444");
        for (int t = 0; t <= 4; ++t) {
            const double v = t / 4.0;
            doc.line(sx(0.0), sy(v), sx(x_max), sy(v), "#ddd", 0.5);
            doc.text(sx(0.0) - 4.0, sy(v) + 3.0, fmt::format("{:.2f}", v), 8, "end");
        }
        for (int x = 0; x <= static_cast<int>(x_max); x += 2) doc.text(sx(x), sy(0.0) + 12.0, std::to_string(x), 8, "middle");
        doc.text(ox + pw / 2.0, sy(0.0) + 26.0, "load position (m)", 9, "middle");

        for (const auto* s : panel) {
            const auto cfg = std::find_if(report.configs.begin(), report.configs.end(),
                                          [&](const PromptConfig& c) { return c.name == s->config_name; });
            const auto colour = kPalette[static_cast<std::size_t>(cfg - report.configs.begin()) % std::size(kPalette)];
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < s->positions_m.size(); ++i)
                if (s->reliabilities[i].total) pts.emplace_back(s->positions_m[i], s->reliabilities[i].value());
            std::sort(pts.begin(), pts.end());
            for (auto& [x, y] : pts) {
                x = sx(x);
                y = sy(y);
                doc.circle(x, y, 2.0, colour);
            }
            doc.polyline(pts, colour, 1.2);
        }
    }

    const double ly = top + rows * ph + 10.0;
    for (std::size_t i = 0; i < report.configs.size(); ++i) {
        const double y = ly + 16.0 * static_cast<double>(i);
        doc.line(20.0, y, 40.0, y, kPalette[i % std::size(kPalette)], 2.0);
        doc.text(46.0, y + 4.0, report.configs[i].name, 10);
    }
    return doc.str();
}

std::vector<std::filesystem::path> render_report(const EvaluationReport& report,
                                                 const std::vector<BenchmarkCase>& diagram_cases,
                                                 const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::filesystem::path& rel, const std::string& text) {
        write_text_file(out_dir / rel, text);
        written.push_back(out_dir / rel);
    };
    put("report.json", report_to_json(report).dump(2) + "\n");
    put("cases.csv", render_cases_csv(report));
    put("series.csv", render_series_csv(report));
    if (!sweep_families(report).empty()) put("curves.svg", render_curves_svg(report));
    if (report.kind == "ablation") {
        put("ablation.csv", render_ablation_csv(report));
        put("ablation.txt", render_ablation_table(report));
    }
    for (const auto& c : diagram_cases) {
        const auto set = diagrams(c.model);
        put(std::filesystem::path("diagrams") / (case_file_stem(c.id) + ".svg"), render_diagram_svg(c.model, set));
        put(std::filesystem::path("diagrams") / (case_file_stem(c.id) + ".txt"), export_columns(set));
    }
    return written;
}

}  // namespace beameval
