#include "beameval/document.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace beameval {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ParseError::ParseError(std::string field, std::size_t line, const std::string& what)
    : std::runtime_error(what), field_(std::move(field)), line_(line) {}

namespace {

double canonical(double v) { return v == 0.0 ? 0.0 : v; }

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(join(path, key), 0, fmt::format("missing field '{}'", join(path, key)));
    return *it;
}

double require_number(const json& obj, const std::string& path, const std::string& key) {
    const auto& v = require(obj, path, key);
    if (!v.is_number())
        throw ParseError(join(path, key), 0, fmt::format("field '{}' must be a number", join(path, key)));
    return v.get<double>();
}

std::string require_string(const json& obj, const std::string& path, const std::string& key) {
    const auto& v = require(obj, path, key);
    if (!v.is_string())
        throw ParseError(join(path, key), 0, fmt::format("field '{}' must be a string", join(path, key)));
    return v.get<std::string>();
}

Direction require_direction(const json& obj, const std::string& path) {
    const auto text = require_string(obj, path, "direction");
    const auto dir = parse_direction(text);
    if (!dir)
        throw ParseError(join(path, "direction"), 0,
                         fmt::format("'{}' must be \"up\" or \"down\"", join(path, "direction")));
    return *dir;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

ordered_json model_to_json(const BeamModel& model) {
    ordered_json doc;
    doc["id"] = model.id;
    doc["span_m"] = canonical(model.span_m);
    doc["supports"] = ordered_json::array();
    for (const auto& s : model.supports) {
        ordered_json js;
        js["kind"] = to_string(s.kind);
        js["position_m"] = canonical(s.position_m);
        doc["supports"].push_back(std::move(js));
    }
    doc["loads"] = ordered_json::array();
    for (const auto& l : model.loads) {
        ordered_json jl;
        if (const auto* p = std::get_if<PointLoad>(&l)) {
            jl["type"] = "point";
            jl["magnitude_kN"] = canonical(p->magnitude_kN);
            jl["position_m"] = canonical(p->position_m);
            jl["direction"] = to_string(p->direction);
        } else {
            const auto& u = std::get<DistributedLoad>(l);
            jl["type"] = "udl";
            jl["intensity_kN_per_m"] = canonical(u.intensity_kN_per_m);
            jl["start_m"] = canonical(u.start_m);
            jl["end_m"] = canonical(u.end_m);
            jl["direction"] = to_string(u.direction);
        }
        doc["loads"].push_back(std::move(jl));
    }
    return doc;
}

BeamModel model_from_json(const json& doc, const std::string& path) {
    if (!doc.is_object()) throw ParseError(path, 0, "problem document must be an object");

    BeamModel model;
    model.id = require_string(doc, path, "id");
    model.span_m = require_number(doc, path, "span_m");

    const auto& supports = require(doc, path, "supports");
    if (!supports.is_array()) throw ParseError(join(path, "supports"), 0, "'supports' must be a list");
    for (std::size_t i = 0; i < supports.size(); ++i) {
        const auto sp = fmt::format("{}[{}]", join(path, "supports"), i);
        if (!supports[i].is_object()) throw ParseError(sp, 0, fmt::format("'{}' must be an object", sp));
        const auto kind_text = require_string(supports[i], sp, "kind");
        const auto kind = parse_support_kind(kind_text);
        if (!kind)
            throw ParseError(join(sp, "kind"), 0,
                             fmt::format("unknown support kind '{}'", kind_text));
        model.supports.push_back({*kind, require_number(supports[i], sp, "position_m")});
    }

    const auto& loads = require(doc, path, "loads");
    if (!loads.is_array()) throw ParseError(join(path, "loads"), 0, "'loads' must be a list");
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const auto lp = fmt::format("{}[{}]", join(path, "loads"), i);
        const auto& jl = loads[i];
        if (!jl.is_object()) throw ParseError(lp, 0, fmt::format("'{}' must be an object", lp));
        const auto type = require_string(jl, lp, "type");
        if (type == "point") {
            model.loads.emplace_back(PointLoad{require_number(jl, lp, "magnitude_kN"),
                                               require_number(jl, lp, "position_m"),
                                               require_direction(jl, lp)});
        } else if (type == "udl") {
            model.loads.emplace_back(DistributedLoad{require_number(jl, lp, "intensity_kN_per_m"),
                                                     require_number(jl, lp, "start_m"),
                                                     require_number(jl, lp, "end_m"),
                                                     require_direction(jl, lp)});
        } else {
            throw ParseError(join(lp, "type"), 0, fmt::format("unknown load type '{}'", type));
        }
    }
    return model;
}

std::string serialize_problem(const BeamModel& model) {
    validate(model);
    return model_to_json(model).dump(2) + "\n";
}

BeamModel parse_problem(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("", line_of(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
    }
    return model_from_json(doc);
}

BeamModel load_problem(std::string_view text) {
    auto model = parse_problem(text);
    validate(model);
    return model;
}

ordered_json reactions_to_json(const ReactionSet& reactions, const BeamModel& model) {
    ordered_json out = ordered_json::array();
    for (const auto& r : reactions.entries) {
        ordered_json e;
        e["support"] = support_label(r.support_index);
        if (r.support_index < model.supports.size()) {
            e["kind"] = to_string(model.supports[r.support_index].kind);
            e["position"] = canonical(model.supports[r.support_index].position_m);
        }
        e["V"] = canonical(r.vertical_kN);
        if (r.horizontal_kN) e["H"] = canonical(*r.horizontal_kN);
        if (r.moment_kNm) e["M"] = canonical(*r.moment_kNm);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace beameval
