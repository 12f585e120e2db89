#pragma once

#include "relkit/grpo.hpp"
#include "relkit/reward.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relkit {

class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct ToolConfig
{
    std::size_t num_generations = 10;
    std::optional<std::size_t> tau;  // ceil(G / 2) when unset
    RewardWeights weights;
    GrpoConfig<double> grpo;

    std::string oracle = "exact";  // exact | remote
    std::string oracle_endpoint = "http://127.0.0.1:8080";
    int oracle_timeout_ms = 10000;
    int oracle_retries = 2;
    std::optional<std::string> oracle_cache;

    std::string matcher = "string";  // string | nli
    std::vector<std::string> markers;
    bool lenient = false;

    double entropy_threshold = 1.0;
    std::string abstention_text = "I don't know.";

    std::uint64_t seed = 42;
    std::size_t workers = 1;

    ToolConfig();

    std::size_t effective_tau() const noexcept { return tau.value_or(default_tau(num_generations)); }

    /// Throws ConfigError on out-of-range or contradictory values.
    void validate() const;
};

/// Applies a flat JSON object on top of `cfg`. Unknown keys and type
/// mismatches are ConfigErrors.
void apply_config_json(ToolConfig& cfg, const std::string& json_text);
void apply_config_file(ToolConfig& cfg, const std::filesystem::path& path);

/// RELKIT_ORACLE_ENDPOINT, RELKIT_ORACLE_TIMEOUT_MS, RELKIT_ORACLE_RETRIES.
using EnvLookup = std::function<std::optional<std::string>(const char*)>;
void apply_env(ToolConfig& cfg, const EnvLookup& env);
std::optional<std::string> process_env(const char* name);

} // namespace relkit
