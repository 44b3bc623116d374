#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "beameval/backend.hpp"
#include "beameval/benchmark.hpp"

namespace beameval {

/// Scripted error modes of a mock answer producer.
enum class MockError {
    EqualSharing,         ///< total load split evenly between the supports
    AlgebraPerturbation,  ///< one component off by 10 to 50 percent
    DirectionFlip,        ///< largest component reported with the wrong sign
    HallucinatedSupport,  ///< an extra roller, solved as an indeterminate beam
    UdlExtension,         ///< every udl stretched to start at x = 0
    ExecutionFailure,     ///< no code block, so nothing runs
};

const char* to_string(MockError e);
std::optional<MockError> parse_mock_error(std::string_view text);
const std::vector<MockError>& all_mock_errors();

/// Probability of each error mode; the remainder answers correctly.
struct ErrorProfile {
    std::map<MockError, double> rates;

    double total() const;
    /// Shorthand: rate p of algebra perturbation, which never grades correct.
    static ErrorProfile error_rate(double p);
    bool operator==(const ErrorProfile&) const = default;
};

nlohmann::ordered_json profile_to_json(const ErrorProfile& profile);
/// Accepts {"error_rate": p} or {"<mode>": rate, ...}.
ErrorProfile profile_from_json(const nlohmann::json& doc);

/// Sample from a seeded categorical: one uniform draw against the
/// cumulative rates in all_mock_errors() order.
std::optional<MockError> sample_error(const ErrorProfile& profile, double u);

/// The wrong answer a given error mode produces for a model. Returns the
/// result document ({"reactions", "model"?}) an agent pipeline would emit.
nlohmann::json erroneous_payload(MockError error, const BeamModel& model, std::mt19937_64& rng);

/// Text form of a result document, one "R_A = 6 kN upward" line per
/// component.
std::string answer_text(const nlohmann::json& payload, const BeamModel& model);

struct MockOptions {
    std::uint64_t seed = 0;
    ErrorProfile profile;
    /// Per (prompt config name, case id) overrides; an empty case id applies
    /// to every case of that config.
    std::map<std::pair<std::string, std::string>, ErrorProfile> overrides;
    /// true: answer like the agent pipeline (structured payload plus a code
    /// block). false: answer like a plain chat model (text lines only).
    bool structured = true;
};

/// Deterministic stand-in for a language model. Outcomes depend only on
/// (seed, config name, case id, run index), never on call order.
class MockBackend : public Backend {
public:
    MockBackend(std::vector<BenchmarkCase> cases, MockOptions options);

    std::string name() const override { return "mock"; }
    BackendResponse invoke(const BackendRequest& request) override;

    const ErrorProfile& profile_for(const std::string& config_name, const std::string& case_id) const;

private:
    std::map<std::string, BenchmarkCase> cases_;
    MockOptions options_;
};

/// Per-run generator seed: SHA-256 of (tag, seed, config, case, run).
std::uint64_t derive_seed(std::string_view tag, std::uint64_t seed, std::string_view config, std::string_view case_id,
                          std::size_t run_index);

/// Uniform double in [0, 1) from the top 53 bits of one draw, identical on
/// every standard library.
double uniform01(std::mt19937_64& rng);

}  // namespace beameval
