#include "beameval/prompt.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "beameval/hash.hpp"
#include "beameval/io.hpp"

#ifndef BEAMEVAL_ASSET_DIR
#define BEAMEVAL_ASSET_DIR "assets/prompt/v1"
#endif

namespace beameval {

const char* component_key(PromptComponent c) {
    switch (c) {
        case PromptComponent::Role: return "role";
        case PromptComponent::ChainOfThought: return "chain_of_thought";
        case PromptComponent::CompleteExample: return "complete_example";
        case PromptComponent::FunctionExamples: return "function_examples";
        case PromptComponent::Constraints: return "constraints";
    }
    return "?";
}

const char* component_header(PromptComponent c) {
    switch (c) {
        case PromptComponent::Role: return "## Role";
        case PromptComponent::ChainOfThought: return "## Chain of thought";
        case PromptComponent::CompleteExample: return "## Complete example";
        case PromptComponent::FunctionExamples: return "## Function usage examples";
        case PromptComponent::Constraints: return "## Constraints";
    }
    return "?";
}

bool PromptConfig::includes(PromptComponent c) const {
    switch (c) {
        case PromptComponent::Role: return include_role;
        case PromptComponent::ChainOfThought: return include_chain_of_thought;
        case PromptComponent::CompleteExample: return include_complete_example;
        case PromptComponent::FunctionExamples: return include_function_examples;
        case PromptComponent::Constraints: return include_constraints;
    }
    return false;
}

PromptConfig proposed_config() { return {}; }

PromptConfig baseline_config() { return {"baseline", false, false, false, false, false}; }

std::vector<PromptConfig> ablation_grid() {
    std::vector<PromptConfig> grid{proposed_config()};
    auto without = [&](const char* name, bool PromptConfig::*flag) {
        PromptConfig c;
        c.name = name;
        c.*flag = false;
        grid.push_back(c);
    };
    without("w/o chain of thought", &PromptConfig::include_chain_of_thought);
    without("w/o complete example", &PromptConfig::include_complete_example);
    without("w/o function usage examples", &PromptConfig::include_function_examples);
    without("w/o constraints", &PromptConfig::include_constraints);
    return grid;
}

nlohmann::ordered_json config_to_json(const PromptConfig& config) {
    nlohmann::ordered_json j;
    j["name"] = config.name;
    for (auto c : kComponentOrder) j[component_key(c)] = config.includes(c);
    return j;
}

PromptConfig config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("prompt config must be an object");
    PromptConfig c;
    c.name = doc.value("name", c.name);
    c.include_role = doc.value("role", true);
    c.include_chain_of_thought = doc.value("chain_of_thought", true);
    c.include_complete_example = doc.value("complete_example", true);
    c.include_function_examples = doc.value("function_examples", true);
    c.include_constraints = doc.value("constraints", true);
    return c;
}

PromptAssets load_prompt_assets(const std::filesystem::path& dir) {
    PromptAssets assets;
    assets.version = dir.filename().string();
    if (assets.version.empty()) assets.version = dir.parent_path().filename().string();
    for (auto c : kComponentOrder) {
        const auto path = dir / (std::string(component_key(c)) + ".txt");
        std::string text;
        try {
            text = read_text_file(path);
        } catch (const IoError&) {
            throw MissingAsset(fmt::format("prompt asset missing: {}", path.string()));
        }
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        if (text.empty()) throw MissingAsset(fmt::format("prompt asset empty: {}", path.string()));
        assets.texts[static_cast<std::size_t>(c)] = std::move(text);
    }
    return assets;
}

std::filesystem::path default_asset_dir() {
    if (const char* env = std::getenv("BEAMEVAL_ASSET_DIR"); env && *env) return env;
    return BEAMEVAL_ASSET_DIR;
}

PromptBundle assemble(const PromptConfig& config, const PromptAssets& assets, std::string_view problem_text) {
    PromptBundle bundle;
    bundle.config_name = config.name;

    FieldHasher h;
    h.field("beameval-prompt").field(assets.version);
    for (auto c : kComponentOrder) {
        const bool on = config.includes(c);
        h.field(std::uint64_t{on});
        if (!on) continue;
        const auto& text = assets.text(c);
        if (text.empty()) throw MissingAsset(fmt::format("prompt asset not loaded: {}", component_key(c)));
        if (!bundle.system_text.empty()) bundle.system_text += "\n\n";
        bundle.system_text += component_header(c);
        bundle.system_text += "\n";
        bundle.system_text += text;
        h.field(text);
    }
    if (!bundle.system_text.empty()) bundle.system_text += "\n";
    bundle.user_text = std::string(problem_text);
    h.field(problem_text);
    bundle.fingerprint = to_hex(h.finish());
    return bundle;
}

}  // namespace beameval
