#include "beameval/mock.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "beameval/document.hpp"
#include "beameval/fem.hpp"
#include "beameval/hash.hpp"
#include "beameval/statics.hpp"

namespace beameval {

namespace {

constexpr std::pair<MockError, const char*> kNames[] = {
    {MockError::EqualSharing, "equal_sharing"},
    {MockError::AlgebraPerturbation, "algebra_perturbation"},
    {MockError::DirectionFlip, "direction_flip"},
    {MockError::HallucinatedSupport, "hallucinated_support"},
    {MockError::UdlExtension, "udl_extension"},
    {MockError::ExecutionFailure, "execution_failure"},
};

nlohmann::json payload_of(const ReactionSet& reactions, const BeamModel& model) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& r : reactions.entries) {
        nlohmann::json e;
        e["position"] = model.supports[r.support_index].position_m;
        e["V"] = r.vertical_kN;
        if (r.horizontal_kN) e["H"] = *r.horizontal_kN;
        if (r.moment_kNm) e["M"] = *r.moment_kNm;
        list.push_back(std::move(e));
    }
    return {{"reactions", std::move(list)}};
}

nlohmann::json with_model(nlohmann::json payload, const BeamModel& model) {
    payload["model"] = nlohmann::json::parse(model_to_json(model).dump());
    return payload;
}

// Addresses of every reported component, as (entry, key).
std::vector<std::pair<std::size_t, const char*>> components(const nlohmann::json& payload) {
    std::vector<std::pair<std::size_t, const char*>> out;
    const auto& list = payload["reactions"];
    for (std::size_t i = 0; i < list.size(); ++i) {
        out.emplace_back(i, "V");
        if (list[i].contains("M")) out.emplace_back(i, "M");
    }
    return out;
}

double extra_roller_position(const BeamModel& m) {
    auto occupied = [&](double x) {
        return std::any_of(m.supports.begin(), m.supports.end(),
                           [&](const Support& s) { return std::abs(s.position_m - x) < 1e-9; });
    };
    if (!occupied(m.span_m)) return m.span_m;
    if (!occupied(0.0)) return 0.0;
    // Both ends supported: midway between the first two supports.
    return std::round(0.5 * (m.supports[0].position_m + m.supports[1].position_m) * 2.0) / 2.0;
}

}  // namespace

const char* to_string(MockError e) {
    for (const auto& [k, name] : kNames)
        if (k == e) return name;
    return "?";
}

std::optional<MockError> parse_mock_error(std::string_view text) {
    for (const auto& [k, name] : kNames)
        if (text == name) return k;
    return std::nullopt;
}

const std::vector<MockError>& all_mock_errors() {
    static const std::vector<MockError> all = [] {
        std::vector<MockError> v;
        for (const auto& [k, name] : kNames) v.push_back(k);
        return v;
    }();
    return all;
}

double ErrorProfile::total() const {
    double t = 0.0;
    for (const auto& [k, p] : rates) t += p;
    return t;
}

ErrorProfile ErrorProfile::error_rate(double p) {
    ErrorProfile e;
    if (p > 0.0) e.rates[MockError::AlgebraPerturbation] = p;
    return e;
}

nlohmann::ordered_json profile_to_json(const ErrorProfile& profile) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (auto e : all_mock_errors())
        if (const auto it = profile.rates.find(e); it != profile.rates.end()) j[to_string(e)] = it->second;
    return j;
}

ErrorProfile profile_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("error profile must be an object");
    ErrorProfile p;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_number() || value.get<double>() < 0.0 || value.get<double>() > 1.0)
            throw std::invalid_argument(fmt::format("error rate '{}' must be a number in [0, 1]", key));
        const double rate = value.get<double>();
        if (key == "error_rate") {
            p.rates[MockError::AlgebraPerturbation] += rate;
        } else if (const auto e = parse_mock_error(key)) {
            p.rates[*e] += rate;
        } else {
            throw std::invalid_argument(fmt::format("unknown mock error mode '{}'", key));
        }
    }
    if (p.total() > 1.0 + 1e-12) throw std::invalid_argument("error rates sum to more than 1");
    return p;
}

std::optional<MockError> sample_error(const ErrorProfile& profile, double u) {
    double cumulative = 0.0;
    for (auto e : all_mock_errors()) {
        const auto it = profile.rates.find(e);
        if (it == profile.rates.end()) continue;
        cumulative += it->second;
        if (u < cumulative) return e;
    }
    return std::nullopt;
}

nlohmann::json erroneous_payload(MockError error, const BeamModel& model, std::mt19937_64& rng) {
    const auto oracle = solve_reactions(model);
    switch (error) {
        case MockError::EqualSharing: {
            auto r = oracle;
            const double total = -resultant(model.loads).force_kN;
            for (auto& e : r.entries) {
                e.vertical_kN = total / static_cast<double>(r.entries.size());
                if (e.moment_kNm) e.moment_kNm = 0.0;
            }
            return payload_of(r, model);
        }
        case MockError::AlgebraPerturbation: {
            auto payload = payload_of(oracle, model);
            const auto comps = components(payload);
            const auto [entry, key] = comps[static_cast<std::size_t>(rng() % comps.size())];
            const double sign = (rng() & 1) ? 1.0 : -1.0;
            const double u = uniform01(rng);
            auto& v = payload["reactions"][entry][key];
            const double value = v.get<double>();
            v = std::abs(value) < 1e-9 ? sign * (1.0 + 4.0 * u) : value * (1.0 + sign * (0.1 + 0.4 * u));
            return payload;
        }
        case MockError::DirectionFlip: {
            auto payload = payload_of(oracle, model);
            std::pair<std::size_t, const char*> worst{0, "V"};
            double largest = -1.0;
            for (const auto& c : components(payload)) {
                const double a = std::abs(payload["reactions"][c.first][c.second].get<double>());
                if (a > largest) {
                    largest = a;
                    worst = c;
                }
            }
            auto& v = payload["reactions"][worst.first][worst.second];
            v = -v.get<double>();
            return payload;
        }
        case MockError::HallucinatedSupport: {
            auto m = model;
            m.supports.push_back({SupportKind::Roller, extra_roller_position(model)});
            std::stable_sort(m.supports.begin(), m.supports.end(),
                             [](const Support& a, const Support& b) { return a.position_m < b.position_m; });
            return with_model(payload_of(fem::analyze(m).reactions, m), m);
        }
        case MockError::UdlExtension: {
            auto m = model;
            bool changed = false;
            for (auto& l : m.loads)
                if (auto* u = std::get_if<DistributedLoad>(&l)) {
                    if (u->start_m > 0.0) u->start_m = 0.0;
                    else u->end_m = m.span_m;
                    changed = true;
                }
            if (!changed) return erroneous_payload(MockError::AlgebraPerturbation, model, rng);
            return with_model(payload_of(solve_reactions(m), m), m);
        }
        case MockError::ExecutionFailure:
            break;
    }
    return nlohmann::json::object();
}

std::string answer_text(const nlohmann::json& payload, const BeamModel& model) {
    std::string text;
    std::size_t extra = model.supports.size();
    for (const auto& e : payload.at("reactions")) {
        const double x = e.at("position").get<double>();
        std::string label;
        for (std::size_t i = 0; i < model.supports.size(); ++i)
            if (std::abs(model.supports[i].position_m - x) < 1e-9) label = support_label(i);
        if (label.empty()) label = support_label(extra++);
        const double v = e.at("V").get<double>();
        text += fmt::format("R_{} = {:.10g} kN {}\n", label, std::abs(v), v < 0 ? "downward" : "upward");
        if (e.contains("M")) {
            const double m = e["M"].get<double>();
            text += fmt::format("M_{} = {:.10g} kN·m {}\n", label, std::abs(m), m < 0 ? "clockwise" : "counterclockwise");
        }
    }
    return text;
}

std::uint64_t derive_seed(std::string_view tag, std::uint64_t seed, std::string_view config, std::string_view case_id,
                          std::size_t run_index) {
    FieldHasher h;
    h.field(tag).field(seed).field(config).field(case_id).field(static_cast<std::uint64_t>(run_index));
    return digest_seed(h.finish());
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

MockBackend::MockBackend(std::vector<BenchmarkCase> cases, MockOptions options) : options_(std::move(options)) {
    for (auto& c : cases) cases_.emplace(c.id, std::move(c));
}

const ErrorProfile& MockBackend::profile_for(const std::string& config_name, const std::string& case_id) const {
    if (const auto it = options_.overrides.find({config_name, case_id}); it != options_.overrides.end())
        return it->second;
    if (const auto it = options_.overrides.find({config_name, ""}); it != options_.overrides.end()) return it->second;
    return options_.profile;
}

BackendResponse MockBackend::invoke(const BackendRequest& request) {
    const auto it = cases_.find(request.case_id);
    if (it == cases_.end()) throw BackendError(fmt::format("mock has no case '{}'", request.case_id));
    const auto& model = it->second.model;

    std::mt19937_64 rng(derive_seed("mock", options_.seed, request.bundle.config_name, request.case_id,
                                    request.run_index));
    const auto error = sample_error(profile_for(request.bundle.config_name, request.case_id), uniform01(rng));

    BackendResponse r;
    if (error == MockError::ExecutionFailure) {
        r.raw_text = "The reactions follow from the equilibrium of the beam.\n";
        if (options_.structured)
            r.failure = Failure{failure_kind::kCodeExtraction, "response contains no fenced code block"};
        return r;
    }

    const auto payload = error ? erroneous_payload(*error, model, rng) : payload_of(solve_reactions(model), model);
    if (!options_.structured) {
        r.raw_text = answer_text(payload, model);
        return r;
    }
    const auto script = fmt::format("# mock script for {}\nprint(\"{}\")\nprint({})\n", request.case_id,
                                    kResultDelimiter, nlohmann::json(payload).dump());
    r.raw_text = "```python\n" + script + "```\n";
    r.artifacts.generated_script = script;
    if (payload.contains("model")) r.artifacts.model_document = payload["model"].dump(2);
    r.structured_answer = payload;
    return r;
}

}  // namespace beameval
