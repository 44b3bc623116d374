#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace beameval {

/// Line a generated script prints before its result document.
inline constexpr std::string_view kResultDelimiter = "===RESULT===";

/// Schema line of the result document, as the constraints component states it.
inline constexpr std::string_view kResultSchema =
    R"({"reactions": [{"position": <support x in m>, "V": <vertical reaction in kN, upward positive>, )"
    R"("H": <horizontal reaction in kN, optional>, "M": <moment reaction in kN*m, counterclockwise positive, )"
    R"(fixed supports only>}]})";

class MissingAsset : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PromptComponent { Role, ChainOfThought, CompleteExample, FunctionExamples, Constraints };

inline constexpr std::array<PromptComponent, 5> kComponentOrder = {
    PromptComponent::Role, PromptComponent::ChainOfThought, PromptComponent::CompleteExample,
    PromptComponent::FunctionExamples, PromptComponent::Constraints};

/// "role", "chain_of_thought", ... (asset file stem and JSON key).
const char* component_key(PromptComponent c);

/// "## Role", "## Chain of thought", ...
const char* component_header(PromptComponent c);

struct PromptConfig {
    std::string name = "proposed";
    bool include_role = true;
    bool include_chain_of_thought = true;
    bool include_complete_example = true;
    bool include_function_examples = true;
    bool include_constraints = true;

    bool includes(PromptComponent c) const;
    bool operator==(const PromptConfig&) const = default;
};

/// Every component included.
PromptConfig proposed_config();

/// No component: the bare problem statement, as a plain chat model sees it.
PromptConfig baseline_config();

/// proposed, then one config per removed component, in template order after
/// the role: w/o chain of thought, w/o complete example, w/o function usage
/// examples, w/o constraints.
std::vector<PromptConfig> ablation_grid();

nlohmann::ordered_json config_to_json(const PromptConfig& config);
PromptConfig config_from_json(const nlohmann::json& doc);

struct PromptAssets {
    std::string version;                 ///< asset directory name, e.g. "v1"
    std::array<std::string, 5> texts;    ///< indexed like kComponentOrder

    const std::string& text(PromptComponent c) const { return texts[static_cast<std::size_t>(c)]; }
};

/// Loads `<key>.txt` for every component. Throws MissingAsset when a file
/// is absent, unreadable or empty.
PromptAssets load_prompt_assets(const std::filesystem::path& dir);

/// $BEAMEVAL_ASSET_DIR when set, otherwise the directory compiled in.
std::filesystem::path default_asset_dir();

struct PromptBundle {
    std::string system_text;
    std::string user_text;
    std::string config_name;
    std::string fingerprint;  ///< hex SHA-256 of asset version, included texts, config bits, problem text
};

/// Pure function of its inputs. Included components appear verbatim under
/// their headers in template order; excluded ones leave nothing behind.
PromptBundle assemble(const PromptConfig& config, const PromptAssets& assets, std::string_view problem_text);

}  // namespace beameval
