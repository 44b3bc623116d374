#include "beameval/backend.hpp"

namespace beameval {

nlohmann::ordered_json params_to_json(const SamplingParams& params) {
    nlohmann::ordered_json j;
    j["temperature"] = params.temperature;
    j["max_tokens"] = params.max_tokens;
    j["seed"] = params.seed ? nlohmann::ordered_json(*params.seed) : nlohmann::ordered_json(nullptr);
    return j;
}

SamplingParams params_from_json(const nlohmann::json& doc) {
    SamplingParams p;
    p.temperature = doc.value("temperature", p.temperature);
    p.max_tokens = doc.value("max_tokens", p.max_tokens);
    if (const auto it = doc.find("seed"); it != doc.end() && !it->is_null()) p.seed = it->get<std::uint64_t>();
    return p;
}

nlohmann::ordered_json response_to_json(const BackendResponse& r) {
    nlohmann::ordered_json j;
    j["raw_text"] = r.raw_text;
    j["structured_answer"] = r.structured_answer ? nlohmann::ordered_json(*r.structured_answer)
                                                  : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json art = nlohmann::ordered_json::object();
    if (r.artifacts.generated_script) art["generated_script"] = *r.artifacts.generated_script;
    if (r.artifacts.execution_log) art["execution_log"] = *r.artifacts.execution_log;
    if (r.artifacts.model_document) art["model_document"] = *r.artifacts.model_document;
    j["artifacts"] = std::move(art);
    j["latency_s"] = r.latency_s;
    if (r.failure)
        j["failure"] = {{"kind", r.failure->kind}, {"detail", r.failure->detail}};
    else
        j["failure"] = nullptr;
    return j;
}

BackendResponse response_from_json(const nlohmann::json& doc) {
    BackendResponse r;
    r.raw_text = doc.value("raw_text", std::string{});
    if (const auto it = doc.find("structured_answer"); it != doc.end() && !it->is_null()) r.structured_answer = *it;
    if (const auto art = doc.find("artifacts"); art != doc.end() && art->is_object()) {
        auto take = [&](const char* key, std::optional<std::string>& out) {
            if (const auto v = art->find(key); v != art->end() && v->is_string()) out = v->get<std::string>();
        };
        take("generated_script", r.artifacts.generated_script);
        take("execution_log", r.artifacts.execution_log);
        take("model_document", r.artifacts.model_document);
    }
    r.latency_s = doc.value("latency_s", 0.0);
    if (const auto f = doc.find("failure"); f != doc.end() && f->is_object())
        r.failure = Failure{f->value("kind", std::string{}), f->value("detail", std::string{})};
    return r;
}

}  // namespace beameval
