#include "relkit/config.hpp"

#include "relkit/eval.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace relkit {

using nlohmann::json;

ToolConfig::ToolConfig() : markers(default_abstention_markers()) {}

void ToolConfig::validate() const
{
    if (num_generations < 1)
        throw ConfigError("num_generations must be >= 1");
    if (tau && (*tau < 1 || *tau > num_generations))
        throw ConfigError("tau must lie in [1, num_generations]");
    try {
        weights.validate();
        grpo.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (oracle != "exact" && oracle != "remote")
        throw ConfigError("oracle must be 'exact' or 'remote', got '" + oracle + "'");
    if (matcher != "string" && matcher != "nli")
        throw ConfigError("matcher must be 'string' or 'nli', got '" + matcher + "'");
    if (oracle_timeout_ms <= 0)
        throw ConfigError("oracle_timeout_ms must be > 0");
    if (oracle_retries < 0)
        throw ConfigError("oracle_retries must be >= 0");
    if (workers < 1)
        throw ConfigError("workers must be >= 1");
    if (!std::isfinite(entropy_threshold) || entropy_threshold < 0.0)
        throw ConfigError("entropy_threshold must be finite and >= 0");
}

namespace {

template <typename T>
T get_as(const json& v, const std::string& key)
{
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

std::size_t get_count(const json& v, const std::string& key)
{
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError("config key '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

int parse_int_env(const std::string& s, const char* name)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string(name) + " is not an integer: '" + s + "'");
    }
}

} // namespace

void apply_config_json(ToolConfig& cfg, const std::string& json_text)
{
    const json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw ConfigError("config must be a flat JSON object");

    for (const auto& [key, v] : doc.items()) {
        if (key == "v")
            continue;
        else if (key == "num_generations")
            cfg.num_generations = get_count(v, key);
        else if (key == "tau")
            cfg.tau = v.is_null() ? std::nullopt : std::optional<std::size_t>(get_count(v, key));
        else if (key == "w_c")
            cfg.weights.confidence = get_as<double>(v, key);
        else if (key == "w_a")
            cfg.weights.accuracy = get_as<double>(v, key);
        else if (key == "w_f")
            cfg.weights.format = get_as<double>(v, key);
        else if (key == "epsilon")
            cfg.grpo.epsilon = get_as<double>(v, key);
        else if (key == "beta")
            cfg.grpo.beta = get_as<double>(v, key);
        else if (key == "std_floor")
            cfg.grpo.std_floor = get_as<double>(v, key);
        else if (key == "oracle")
            cfg.oracle = get_as<std::string>(v, key);
        else if (key == "oracle_endpoint")
            cfg.oracle_endpoint = get_as<std::string>(v, key);
        else if (key == "oracle_timeout_ms")
            cfg.oracle_timeout_ms = get_as<int>(v, key);
        else if (key == "oracle_retries")
            cfg.oracle_retries = get_as<int>(v, key);
        else if (key == "oracle_cache")
            cfg.oracle_cache = v.is_null() ? std::nullopt : std::optional<std::string>(get_as<std::string>(v, key));
        else if (key == "matcher")
            cfg.matcher = get_as<std::string>(v, key);
        else if (key == "markers")
            cfg.markers = get_as<std::vector<std::string>>(v, key);
        else if (key == "lenient")
            cfg.lenient = get_as<bool>(v, key);
        else if (key == "entropy_threshold")
            cfg.entropy_threshold = get_as<double>(v, key);
        else if (key == "abstention_text")
            cfg.abstention_text = get_as<std::string>(v, key);
        else if (key == "seed")
            cfg.seed = get_as<std::uint64_t>(v, key);
        else if (key == "workers")
            cfg.workers = get_count(v, key);
        else
            throw ConfigError("unknown config key '" + key + "'");
    }
}

void apply_config_file(ToolConfig& cfg, const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_json(cfg, ss.str());
}

void apply_env(ToolConfig& cfg, const EnvLookup& env)
{
    if (auto v = env("RELKIT_ORACLE_ENDPOINT"))
        cfg.oracle_endpoint = *v;
    if (auto v = env("RELKIT_ORACLE_TIMEOUT_MS"))
        cfg.oracle_timeout_ms = parse_int_env(*v, "RELKIT_ORACLE_TIMEOUT_MS");
    if (auto v = env("RELKIT_ORACLE_RETRIES"))
        cfg.oracle_retries = parse_int_env(*v, "RELKIT_ORACLE_RETRIES");
}

std::optional<std::string> process_env(const char* name)
{
    if (const char* v = std::getenv(name))
        return std::string(v);
    return std::nullopt;
}

} // namespace relkit
