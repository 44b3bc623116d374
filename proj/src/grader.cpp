#include "beameval/grader.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <regex>

#include <fmt/format.h>

#include "beameval/fem.hpp"
#include "beameval/statics.hpp"

namespace beameval {

namespace {

constexpr std::pair<ErrorClass, const char*> kClassNames[] = {
    {ErrorClass::WrongMagnitude, "wrong_magnitude"},
    {ErrorClass::WrongDirection, "wrong_direction"},
    {ErrorClass::MissingComponent, "missing_component"},
    {ErrorClass::ExtraSupport, "extra_support"},
    {ErrorClass::LoadMisapplication, "load_misapplication"},
    {ErrorClass::ExecutionFailure, "execution_failure"},
    {ErrorClass::ParseFailure, "parse_failure"},
    {ErrorClass::EquilibriumViolation, "equilibrium_violation"},
};

AnswerParseFailure failure(ErrorClass c, std::string detail) { return {c, std::move(detail)}; }

std::optional<std::size_t> support_at(const BeamModel& model, double x, double tol) {
    for (std::size_t i = 0; i < model.supports.size(); ++i)
        if (std::abs(model.supports[i].position_m - x) <= tol) return i;
    return std::nullopt;
}

// Checks every required component is present; returns a failure naming the
// first one that is not.
std::optional<AnswerParseFailure> check_complete(const ParsedAnswer& a, const BeamModel& model,
                                                 const RequiredOutputs& required) {
    for (std::size_t i = 0; i < model.supports.size(); ++i) {
        const auto it = std::find_if(a.reactions.entries.begin(), a.reactions.entries.end(),
                                     [&](const Reaction& r) { return r.support_index == i; });
        const auto label = support_label(i);
        if (it == a.reactions.entries.end())
            return failure(ErrorClass::MissingComponent, fmt::format("no reaction for support {}", label));
        const auto kind = model.supports[i].kind;
        if (required.moment && kind == SupportKind::Fixed && !it->moment_kNm)
            return failure(ErrorClass::MissingComponent, fmt::format("no moment for support {}", label));
        if (required.horizontal && kind != SupportKind::Roller && !it->horizontal_kN)
            return failure(ErrorClass::MissingComponent, fmt::format("no horizontal reaction for support {}", label));
    }
    return std::nullopt;
}

AnswerParse finish(ParsedAnswer a, const BeamModel& model, const RequiredOutputs& required) {
    std::sort(a.reactions.entries.begin(), a.reactions.entries.end(),
              [](const Reaction& x, const Reaction& y) { return x.support_index < y.support_index; });
    if (a.extra_supports.empty())
        if (auto f = check_complete(a, model, required)) return *f;
    return a;
}

std::optional<double> number_field(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw std::invalid_argument(fmt::format("'{}' must be a number", key));
    return it->get<double>();
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size()))
        s.replace(at, from.size(), to);
    return s;
}

bool loads_match(const Load& a, const Load& b, double tol) {
    if (a.index() != b.index()) return false;
    if (const auto* p = std::get_if<PointLoad>(&a)) {
        const auto& q = std::get<PointLoad>(b);
        return p->direction == q.direction && std::abs(p->magnitude_kN - q.magnitude_kN) <= tol &&
               std::abs(p->position_m - q.position_m) <= tol;
    }
    const auto& u = std::get<DistributedLoad>(a);
    const auto& v = std::get<DistributedLoad>(b);
    return u.direction == v.direction && std::abs(u.intensity_kN_per_m - v.intensity_kN_per_m) <= tol &&
           std::abs(u.start_m - v.start_m) <= tol && std::abs(u.end_m - v.end_m) <= tol;
}

// Multiset comparison with tolerance, greedy (load lists are tiny).
bool same_loads(const std::vector<Load>& a, const std::vector<Load>& b, double tol) {
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const auto& l : a) {
        bool found = false;
        for (std::size_t j = 0; j < b.size() && !found; ++j)
            if (!used[j] && loads_match(l, b[j], tol)) used[j] = found = true;
        if (!found) return false;
    }
    return true;
}

}  // namespace

const char* to_string(ErrorClass c) {
    for (const auto& [k, name] : kClassNames)
        if (k == c) return name;
    return "?";
}

std::optional<ErrorClass> parse_error_class(std::string_view text) {
    for (const auto& [k, name] : kClassNames)
        if (text == name) return k;
    return std::nullopt;
}

AnswerParse parse_payload(const nlohmann::json& payload, const BeamModel& model, const RequiredOutputs& required) {
    if (!payload.is_object()) return failure(ErrorClass::ParseFailure, "result document is not an object");
    const auto rs = payload.find("reactions");
    if (rs == payload.end() || !rs->is_array())
        return failure(ErrorClass::ParseFailure, "result document has no 'reactions' list");

    double scale = 1.0;
    if (const auto u = payload.find("units"); u != payload.end()) {
        if (*u == "N") scale = 1e-3;
        else if (*u != "kN") return failure(ErrorClass::ParseFailure, "units must be \"kN\" or \"N\"");
    }

    ParsedAnswer out;
    const GradeOptions defaults;
    try {
        for (std::size_t k = 0; k < rs->size(); ++k) {
            const auto& e = (*rs)[k];
            if (!e.is_object()) return failure(ErrorClass::ParseFailure, fmt::format("reactions[{}] is not an object", k));
            auto pos = number_field(e, "position");
            if (!pos) pos = number_field(e, "pos");
            std::optional<std::size_t> index;
            std::string where;
            if (pos) {
                index = support_at(model, *pos, defaults.position_tolerance_m);
                where = fmt::format("x = {} m", format_number(*pos));
            } else if (const auto s = e.find("support"); s != e.end() && s->is_string()) {
                for (std::size_t i = 0; i < model.supports.size(); ++i)
                    if (support_label(i) == s->get<std::string>()) index = i;
                where = "label " + s->get<std::string>();
            } else {
                return failure(ErrorClass::ParseFailure, fmt::format("reactions[{}] has no position", k));
            }
            if (!index) {
                out.extra_supports.push_back(where);
                continue;
            }
            const auto v = number_field(e, "V");
            if (!v)
                return failure(ErrorClass::MissingComponent,
                               fmt::format("no vertical reaction for support {}", support_label(*index)));
            for (const auto& r : out.reactions.entries)
                if (r.support_index == *index)
                    return failure(ErrorClass::ParseFailure,
                                   fmt::format("support {} reported twice", support_label(*index)));
            Reaction r;
            r.support_index = *index;
            r.vertical_kN = *v * scale;
            const auto kind = model.supports[*index].kind;
            if (const auto h = number_field(e, "H"); h && kind != SupportKind::Roller) r.horizontal_kN = *h * scale;
            if (const auto m = number_field(e, "M"); m && kind == SupportKind::Fixed) r.moment_kNm = *m * scale;
            out.reactions.entries.push_back(r);
        }
        if (const auto md = payload.find("model"); md != payload.end() && !md->is_null())
            out.model_document = fem::model_document_from_json(*md).model;
    } catch (const std::exception& ex) {
        return failure(ErrorClass::ParseFailure, ex.what());
    }
    return finish(std::move(out), model, required);
}

AnswerParse parse_text_answer(std::string_view raw, const BeamModel& model, const RequiredOutputs& required) {
    std::string text = replace_all(std::string(raw), "\xE2\x88\x92", "-");  // U+2212 minus sign
    text = replace_all(std::move(text), "\xC2\xB7", "*");                  // middle dot in kN·m

    static const std::regex kLine(
        R"((?:^|[^A-Za-z0-9_])([RVHM])_?\{?([A-Z]{1,2})(?:,?[xy])?\}?\s*(?:=|:)\s*\$?([-+]?\s*\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)\s*(kN\s?[*.-]?\s?m\b|kNm\b|N\s?[*.-]?\s?m\b|Nm\b|kN\b|N\b)?\s*\(?\s*([A-Za-z-]+)?)");

    std::map<std::pair<std::size_t, char>, double> found;
    std::vector<std::string> extra;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), kLine); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        const char symbol = m[1].str()[0];
        const char component = symbol == 'R' ? 'V' : symbol;
        const auto label = m[2].str();

        std::string number = m[3].str();
        number.erase(std::remove(number.begin(), number.end(), ' '), number.end());
        double value = std::stod(number);

        const auto unit = m[4].matched ? m[4].str() : std::string{};
        if (!unit.empty() && unit[0] == 'N') value *= 1e-3;

        const auto word = lower(m[5].matched ? m[5].str() : std::string{});
        double sign = 1.0;
        if (component == 'M') {
            if (word == "clockwise" || word == "cw") sign = -1.0;
        } else if (component == 'V') {
            if (word == "downward" || word == "downwards" || word == "down") sign = -1.0;
        } else if (word == "leftward" || word == "leftwards" || word == "left") {
            sign = -1.0;
        }
        value *= sign;

        std::optional<std::size_t> index;
        for (std::size_t i = 0; i < model.supports.size(); ++i)
            if (support_label(i) == label) index = i;
        if (!index) {
            if (std::find(extra.begin(), extra.end(), "label " + label) == extra.end())
                extra.push_back("label " + label);
            continue;
        }
        found[{*index, component}] = value;
    }
    if (found.empty() && extra.empty())
        return failure(ErrorClass::ParseFailure, "no reaction statements found in the response text");

    ParsedAnswer out;
    out.extra_supports = std::move(extra);
    for (std::size_t i = 0; i < model.supports.size(); ++i) {
        const auto v = found.find({i, 'V'});
        if (v == found.end()) continue;
        Reaction r;
        r.support_index = i;
        r.vertical_kN = v->second;
        const auto kind = model.supports[i].kind;
        if (auto h = found.find({i, 'H'}); h != found.end() && kind != SupportKind::Roller) r.horizontal_kN = h->second;
        if (auto mm = found.find({i, 'M'}); mm != found.end() && kind == SupportKind::Fixed) r.moment_kNm = mm->second;
        out.reactions.entries.push_back(r);
    }
    return finish(std::move(out), model, required);
}

AnswerParse parse_answer(const BackendResponse& response, const BeamModel& model, const RequiredOutputs& required) {
    if (response.structured_answer) return parse_payload(*response.structured_answer, model, required);

    const auto& raw = response.raw_text;
    const auto at = raw.rfind(kResultDelimiter);
    if (at != std::string::npos) {
        const auto body = std::string_view(raw).substr(at + kResultDelimiter.size());
        try {
            return parse_payload(nlohmann::json::parse(body.begin(), body.end()), model, required);
        } catch (const nlohmann::json::parse_error& e) {
            return failure(ErrorClass::ParseFailure, fmt::format("malformed result block: {}", e.what()));
        }
    }
    return parse_text_answer(raw, model, required);
}

Grade grade(const ParsedAnswer& answer, const ReactionSet& oracle, const BeamModel& model,
            const RequiredOutputs& required, const GradeOptions& options) {
    Grade g;
    auto tolerance = [&](double o) { return std::max(options.absolute_tolerance, options.relative_tolerance * std::abs(o)); };

    if (!answer.extra_supports.empty()) {
        g.error_class = ErrorClass::ExtraSupport;
        g.detail = fmt::format("reaction reported at a support the problem does not have ({})",
                               answer.extra_supports.front());
        return g;
    }

    if (answer.model_document) {
        const auto& doc = *answer.model_document;
        bool supports_match = doc.supports.size() == model.supports.size();
        for (std::size_t i = 0; supports_match && i < doc.supports.size(); ++i)
            supports_match = doc.supports[i].kind == model.supports[i].kind &&
                             std::abs(doc.supports[i].position_m - model.supports[i].position_m) <=
                                 options.position_tolerance_m;
        if (!supports_match) {
            g.error_class = ErrorClass::ExtraSupport;
            g.detail = fmt::format("answer model has {} supports that do not match the problem's {}",
                                   doc.supports.size(), model.supports.size());
            return g;
        }
        if (!same_loads(doc.loads, model.loads, options.position_tolerance_m)) {
            g.error_class = ErrorClass::LoadMisapplication;
            g.detail = "answer model applies loads that differ from the problem";
            return g;
        }
        const auto res = equilibrium_residual(doc, answer.reactions);
        const double tol = tolerance(load_scale(doc));
        if (std::abs(res.force_kN) > tol || std::abs(res.moment_kNm) > tol * std::max(1.0, doc.span_m)) {
            g.error_class = ErrorClass::EquilibriumViolation;
            g.detail = fmt::format("answer reactions leave a residual of {:.6g} kN and {:.6g} kN*m", res.force_kN,
                                   res.moment_kNm);
            return g;
        }
    }

    bool missing = false, direction = false, magnitude = false;
    auto compare = [&](std::size_t i, char c, std::optional<double> a, double o) {
        if (!a) {
            missing = true;
            if (g.detail.empty()) g.detail = fmt::format("missing {}_{}", c, support_label(i));
            return;
        }
        const double tol = tolerance(o);
        ComponentDelta d{i, c, *a, o, true};
        if (std::abs(o) > tol && std::abs(*a) > tol && std::signbit(*a) != std::signbit(o)) {
            d.ok = false;
            direction = true;
        } else if (std::abs(*a - o) > tol) {
            d.ok = false;
            magnitude = true;
        }
        g.deltas.push_back(d);
    };

    for (const auto& o : oracle.entries) {
        const auto it = std::find_if(answer.reactions.entries.begin(), answer.reactions.entries.end(),
                                     [&](const Reaction& r) { return r.support_index == o.support_index; });
        const Reaction* a = it == answer.reactions.entries.end() ? nullptr : &*it;
        compare(o.support_index, 'V', a ? std::optional<double>(a->vertical_kN) : std::nullopt, o.vertical_kN);
        if (o.horizontal_kN && (required.horizontal || (a && a->horizontal_kN)))
            compare(o.support_index, 'H', a ? a->horizontal_kN : std::nullopt, *o.horizontal_kN);
        if (o.moment_kNm && (required.moment || (a && a->moment_kNm)))
            compare(o.support_index, 'M', a ? a->moment_kNm : std::nullopt, *o.moment_kNm);
    }

    if (missing) {
        g.error_class = ErrorClass::MissingComponent;
    } else if (direction) {
        g.error_class = ErrorClass::WrongDirection;
    } else if (magnitude) {
        g.error_class = ErrorClass::WrongMagnitude;
    } else {
        g.correct = true;
        g.detail.clear();
        return g;
    }
    if (g.detail.empty())
        for (const auto& d : g.deltas)
            if (!d.ok) {
                g.detail = fmt::format("{}_{} = {} vs {}", d.component, support_label(d.support_index),
                                       format_number(d.answer), format_number(d.oracle));
                break;
            }
    return g;
}

Grade grade(const ReactionSet& answer, const ReactionSet& oracle, const BeamModel& model,
            const RequiredOutputs& required, const GradeOptions& options) {
    ParsedAnswer a;
    a.reactions = answer;
    return grade(a, oracle, model, required, options);
}

Grade grade_response(const BackendResponse& response, const BeamModel& model, const ReactionSet& oracle,
                     const RequiredOutputs& required, const GradeOptions& options) {
    if (response.failure) {
        Grade g;
        g.error_class = ErrorClass::ExecutionFailure;
        g.detail = response.failure->kind + (response.failure->detail.empty() ? "" : ": " + response.failure->detail);
        return g;
    }
    const auto parsed = parse_answer(response, model, required);
    if (const auto* f = std::get_if<AnswerParseFailure>(&parsed)) {
        Grade g;
        g.error_class = f->error_class;
        g.detail = f->detail;
        return g;
    }
    return grade(std::get<ParsedAnswer>(parsed), oracle, model, required, options);
}

nlohmann::ordered_json grade_to_json(const Grade& g) {
    nlohmann::ordered_json j;
    j["correct"] = g.correct;
    j["error_class"] = g.error_class ? nlohmann::ordered_json(to_string(*g.error_class)) : nlohmann::ordered_json(nullptr);
    j["detail"] = g.detail;
    j["deltas"] = nlohmann::ordered_json::array();
    for (const auto& d : g.deltas)
        j["deltas"].push_back({{"support", support_label(d.support_index)},
                               {"component", std::string(1, d.component)},
                               {"answer", d.answer},
                               {"oracle", d.oracle},
                               {"ok", d.ok}});
    return j;
}

Grade grade_from_json(const nlohmann::json& doc) {
    Grade g;
    g.correct = doc.value("correct", false);
    if (const auto it = doc.find("error_class"); it != doc.end() && it->is_string())
        g.error_class = parse_error_class(it->get<std::string>());
    g.detail = doc.value("detail", std::string{});
    if (const auto it = doc.find("deltas"); it != doc.end() && it->is_array())
        for (const auto& d : *it) {
            ComponentDelta cd;
            const auto label = d.value("support", std::string("A"));
            for (std::size_t i = 0; i < 702; ++i)
                if (support_label(i) == label) {
                    cd.support_index = i;
                    break;
                }
            cd.component = d.value("component", std::string("V"))[0];
            cd.answer = d.value("answer", 0.0);
            cd.oracle = d.value("oracle", 0.0);
            cd.ok = d.value("ok", false);
            g.deltas.push_back(cd);
        }
    return g;
}

}  // namespace beameval
