#include "beameval/benchmark.hpp"

#include <cmath>

#include <fmt/format.h>

#include "beameval/document.hpp"
#include "beameval/io.hpp"
#include "beameval/statics.hpp"

namespace beameval {

namespace {

const char* condition_name(LoadCondition c) {
    switch (c) {
        case LoadCondition::I: return "I";
        case LoadCondition::II: return "II";
        case LoadCondition::III: return "III";
        case LoadCondition::IV: return "IV";
    }
    return "?";
}

// Positions from `hi` down to 0 in `step` increments, snapped to the step
// grid so repeated subtraction cannot drift.
std::vector<double> descending(double hi, double step) {
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor(hi / step + 1e-9));
    for (long k = n; k >= 0; --k) out.push_back(static_cast<double>(k) * step);
    return out;
}

bool moves_udl(const Family& f, const BenchmarkOptions& o) {
    return f.condition == LoadCondition::II ||
           (f.condition == LoadCondition::IV && o.iv_mode == SweepMode::CoMoving);
}

std::string describe_support(const BeamModel& m, std::size_t i) {
    const auto& s = m.supports[i];
    return fmt::format("Support {} is a {} support at {} m.", support_label(i), to_string(s.kind),
                       format_number(s.position_m));
}

std::string describe_load(const Load& load) {
    if (const auto* p = std::get_if<PointLoad>(&load))
        return fmt::format("A {} kN {}ward point load at {} m.", format_number(p->magnitude_kN),
                           to_string(p->direction), format_number(p->position_m));
    const auto& u = std::get<DistributedLoad>(load);
    return fmt::format("A {} kN/m {}ward uniformly distributed load from {} m to {} m.",
                       format_number(u.intensity_kN_per_m), to_string(u.direction),
                       format_number(u.start_m), format_number(u.end_m));
}

}  // namespace

std::string Family::id() const {
    return fmt::format("{}-{}", beam == BeamType::SimplySupported ? "SS" : "OH", condition_name(condition));
}

std::vector<Family> families() {
    std::vector<Family> out;
    for (auto beam : {BeamType::SimplySupported, BeamType::Overhang})
        for (auto c : {LoadCondition::I, LoadCondition::II, LoadCondition::III, LoadCondition::IV})
            out.push_back({beam, c});
    return out;
}

std::optional<Family> parse_family(std::string_view id) {
    for (const auto& f : families())
        if (f.id() == id) return f;
    return std::nullopt;
}

RequiredOutputs default_required_outputs(const BeamModel& model) {
    RequiredOutputs r;
    for (const auto& s : model.supports)
        if (s.kind == SupportKind::Fixed) r.moment = true;
    return r;
}

BeamModel family_model(const Family& family, double position_m, const BenchmarkOptions& o) {
    BeamModel m;
    m.id = fmt::format("{}@{}", family.id(), format_number(position_m));
    m.span_m = o.span_m;
    m.supports = {{SupportKind::Pinned, 0.0},
                  {SupportKind::Roller, family.beam == BeamType::Overhang ? o.overhang_roller_m : o.span_m}};

    auto point = [&](double x) { return PointLoad{o.point_kN, x, Direction::Down}; };
    auto udl = [&](double a, double b) { return DistributedLoad{o.udl_kN_per_m, a, b, Direction::Down}; };

    switch (family.condition) {
        case LoadCondition::I:
            m.loads = {point(position_m)};
            break;
        case LoadCondition::II:
            m.loads = {udl(position_m, position_m + o.udl_length_m)};
            break;
        case LoadCondition::III:
            m.loads = {point(position_m), udl(0.0, o.span_m)};
            break;
        case LoadCondition::IV:
            if (o.iv_mode == SweepMode::CoMoving)
                m.loads = {point(position_m + 0.5 * o.udl_length_m), udl(position_m, position_m + o.udl_length_m)};
            else
                m.loads = {point(position_m), udl(o.iv_anchor_start_m, o.iv_anchor_start_m + o.udl_length_m)};
            break;
    }
    validate(m);
    return m;
}

std::vector<BenchmarkCase> generate_benchmark(const BenchmarkOptions& options) {
    std::vector<BenchmarkCase> out;
    for (const auto& f : families()) {
        auto m = family_model(f, options.base_position_m, options);
        out.push_back({m.id, f.id(), options.base_position_m, m, default_required_outputs(m)});
    }
    return out;
}

std::vector<BenchmarkCase> generate_sweep(const Family& family, const BenchmarkOptions& options) {
    const double hi = moves_udl(family, options) ? options.span_m - options.udl_length_m : options.span_m;
    std::vector<BenchmarkCase> out;
    for (double x : descending(hi, options.step_m)) {
        auto m = family_model(family, x, options);
        out.push_back({m.id, family.id(), x, m, default_required_outputs(m)});
    }
    return out;
}

std::vector<BenchmarkCase> generate_all_sweeps(const BenchmarkOptions& options) {
    std::vector<BenchmarkCase> out;
    for (const auto& f : families()) {
        auto sweep = generate_sweep(f, options);
        out.insert(out.end(), sweep.begin(), sweep.end());
    }
    return out;
}

std::vector<BenchmarkCase> extended_tasks(const ExtendedOptions& o) {
    const double P = o.point_kN, w = o.udl_kN_per_m;
    std::vector<BeamModel> models = {
        {"EXT-a", 10.0, {{SupportKind::Pinned, 0.0}, {SupportKind::Roller, 5.0}},
         {PointLoad{P, 9.0, Direction::Up}, DistributedLoad{w, 7.5, 9.5, Direction::Up}}},
        {"EXT-b", 10.0, {{SupportKind::Pinned, 0.0}, {SupportKind::Roller, 7.0}},
         {PointLoad{P, 8.5, Direction::Down}, DistributedLoad{w, 8.2, 9.7, Direction::Down}}},
        {"EXT-c", 10.0, {{SupportKind::Fixed, 0.0}},
         {PointLoad{P, 9.0, Direction::Down}, DistributedLoad{w, 2.5, 7.5, Direction::Down}}},
    };
    std::vector<BenchmarkCase> out;
    for (auto& m : models) {
        validate(m);
        out.push_back({m.id, "EXT", 0.0, m, default_required_outputs(m)});
    }
    return out;
}

std::string render_problem_text(const BeamModel& model, const RequiredOutputs& required) {
    validate(model);
    std::string text = fmt::format(
        "Beam: a straight horizontal beam of span {} m. Positions x are measured in meters from the "
        "left end (x = 0) to the right end (x = {}).\n",
        format_number(model.span_m), format_number(model.span_m));
    text += "\nSupports:\n";
    for (std::size_t i = 0; i < model.supports.size(); ++i) text += "- " + describe_support(model, i) + "\n";
    text += "\nLoads:\n";
    for (const auto& l : model.loads) text += "- " + describe_load(l) + "\n";

    text += "\nFind:\n";
    for (std::size_t i = 0; i < model.supports.size(); ++i) {
        const auto label = support_label(i);
        text += fmt::format("- the vertical reaction force R_{} at support {} (kN, upward or downward)\n", label,
                            label);
        const auto kind = model.supports[i].kind;
        if (required.horizontal && kind != SupportKind::Roller)
            text += fmt::format("- the horizontal reaction force H_{} at support {} (kN)\n", label, label);
        if (required.moment && kind == SupportKind::Fixed)
            text += fmt::format(
                "- the fixed-end moment M_{} at support {} (kN·m, counterclockwise or clockwise)\n", label, label);
    }
    text += "\nUnits: forces in kN, distributed loads in kN/m, moments in kN·m, lengths in m.\n";
    text += "Give each requested value on its own line, for example \"R_A = 12.5 kN upward\"";
    if (required.moment) text += " or \"M_A = 40 kN·m counterclockwise\"";
    text += ".\n";
    return text;
}

std::string case_file_stem(std::string_view id) {
    std::string out(id);
    for (auto& c : out)
        if (c == '/' || c == '\\' || c == ':' || c == ' ') c = '_';
    return out;
}

nlohmann::ordered_json benchmark_manifest(const std::vector<BenchmarkCase>& cases) {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["cases"] = nlohmann::ordered_json::array();
    for (const auto& c : cases) {
        nlohmann::ordered_json e;
        e["id"] = c.id;
        e["family"] = c.family;
        e["position_m"] = c.position_m;
        e["problem"] = "problems/" + case_file_stem(c.id) + ".json";
        e["required"] = {{"horizontal", c.required.horizontal}, {"moment", c.required.moment}};
        e["oracle"] = reactions_to_json(solve_reactions(c.model), c.model);
        doc["cases"].push_back(std::move(e));
    }
    return doc;
}

nlohmann::ordered_json write_problem_tree(const std::filesystem::path& dir, const std::vector<BenchmarkCase>& cases) {
    const auto manifest = benchmark_manifest(cases);
    for (const auto& c : cases)
        write_text_file(dir / "problems" / (case_file_stem(c.id) + ".json"), serialize_problem(c.model));
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

std::vector<BenchmarkCase> read_problem_tree(const std::filesystem::path& dir) {
    const auto path = dir / "manifest.json";
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("", 0, fmt::format("{}: {}", path.string(), e.what()));
    }
    if (!doc.contains("cases") || !doc["cases"].is_array()) throw ParseError("cases", 0, "manifest has no case list");
    std::vector<BenchmarkCase> out;
    for (std::size_t i = 0; i < doc["cases"].size(); ++i) {
        const auto& e = doc["cases"][i];
        const auto locus = fmt::format("cases[{}]", i);
        try {
            BenchmarkCase c;
            c.id = e.at("id").get<std::string>();
            c.family = e.value("family", std::string{});
            c.position_m = e.value("position_m", 0.0);
            c.model = load_problem(read_text_file(dir / e.at("problem").get<std::string>()));
            c.required = default_required_outputs(c.model);
            if (const auto r = e.find("required"); r != e.end() && r->is_object()) {
                c.required.horizontal = r->value("horizontal", c.required.horizontal);
                c.required.moment = r->value("moment", c.required.moment);
            }
            out.push_back(std::move(c));
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(locus, 0, fmt::format("{}: {}", locus, ex.what()));
        }
    }
    return out;
}

}  // namespace beameval
