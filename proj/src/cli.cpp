#include "relkit/cli.hpp"

#include "relkit/clustering.hpp"
#include "relkit/data_prep.hpp"
#include "relkit/entailment.hpp"
#include "relkit/eval.hpp"
#include "relkit/grpo.hpp"
#include "relkit/metrics.hpp"
#include "relkit/parallel.hpp"
#include "relkit/reward.hpp"
#include "relkit/rollout.hpp"
#include "relkit/serialize.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

namespace relkit::cli {

namespace {

struct Flags
{
    std::optional<std::string> config;
    std::optional<std::string> input;
    std::optional<std::string> output;
    std::optional<std::size_t> workers;

    std::optional<std::string> oracle;
    std::optional<std::string> oracle_endpoint;
    std::optional<int> oracle_timeout_ms;
    std::optional<int> oracle_retries;
    std::optional<std::string> oracle_cache;
    std::optional<std::string> matcher;
    bool lenient = false;

    std::optional<std::size_t> num_generations;
    std::optional<std::size_t> tau;
    std::optional<double> w_c, w_a, w_f;
    std::optional<double> epsilon, beta, std_floor;

    std::string mode;
    std::string by = "correctness";
    std::optional<double> threshold;
    std::optional<std::string> abstention_text;

    std::string initial;
    std::string refined;
    std::optional<std::string> markers;
    bool percent = false;
};

template <typename T>
void override_with(T& target, const std::optional<T>& flag)
{
    if (flag)
        target = *flag;
}

std::vector<std::string> split_markers(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(item);
    return out;
}

ToolConfig resolve_config(const Flags& f, const EnvLookup& env)
{
    ToolConfig cfg;
    if (f.config)
        apply_config_file(cfg, *f.config);
    apply_env(cfg, env);

    override_with(cfg.workers, f.workers);
    override_with(cfg.oracle, f.oracle);
    override_with(cfg.oracle_endpoint, f.oracle_endpoint);
    override_with(cfg.oracle_timeout_ms, f.oracle_timeout_ms);
    override_with(cfg.oracle_retries, f.oracle_retries);
    if (f.oracle_cache)
        cfg.oracle_cache = f.oracle_cache;
    override_with(cfg.matcher, f.matcher);
    if (f.lenient)
        cfg.lenient = true;
    override_with(cfg.num_generations, f.num_generations);
    if (f.tau)
        cfg.tau = f.tau;
    override_with(cfg.weights.confidence, f.w_c);
    override_with(cfg.weights.accuracy, f.w_a);
    override_with(cfg.weights.format, f.w_f);
    override_with(cfg.grpo.epsilon, f.epsilon);
    override_with(cfg.grpo.beta, f.beta);
    override_with(cfg.grpo.std_floor, f.std_floor);
    override_with(cfg.entropy_threshold, f.threshold);
    override_with(cfg.abstention_text, f.abstention_text);
    if (f.markers)
        cfg.markers = split_markers(*f.markers);
    cfg.validate();
    return cfg;
}

// Entailment backend selected by the config, always behind a cache.
class OracleStack
{
  public:
    explicit OracleStack(const ToolConfig& cfg)
    {
        if (cfg.oracle == "remote") {
            auto transport = std::make_shared<HttpTransport>(cfg.oracle_endpoint,
                                                             std::chrono::milliseconds(cfg.oracle_timeout_ms));
            auto remote = std::make_unique<RemoteOracle>(std::move(transport), cfg.oracle_retries);
            if (!remote->healthy())
                throw TransportError("entailment service at " + cfg.oracle_endpoint + " failed its health check",
                                     1, 0);
            base_ = std::move(remote);
        } else {
            base_ = std::make_unique<ExactMatchOracle>();
        }
        std::optional<std::filesystem::path> file;
        if (cfg.oracle_cache)
            file = *cfg.oracle_cache;
        cache_ = std::make_unique<CachingOracle>(*base_, file);
    }

    const EntailmentOracle& oracle() const { return *cache_; }

  private:
    std::unique_ptr<EntailmentOracle> base_;
    std::unique_ptr<CachingOracle> cache_;
};

std::unique_ptr<AnswerMatcher> make_matcher(const ToolConfig& cfg, const EntailmentOracle& oracle)
{
    if (cfg.matcher == "nli")
        return std::make_unique<NliMatcher>(oracle);
    return std::make_unique<StringMatcher>();
}

struct Line
{
    std::size_t number;
    std::string text;
};

std::vector<Line> read_lines(std::istream& in)
{
    std::vector<Line> lines;
    std::string text;
    std::size_t n = 0;
    while (std::getline(in, text)) {
        ++n;
        if (!text.empty() && text.back() == '\r')
            text.pop_back();
        if (text.find_first_not_of(" \t") == std::string::npos)
            continue;
        lines.push_back({n, std::move(text)});
    }
    return lines;
}

// One processed record: output or a soft error message.
struct Outcome
{
    std::optional<Json> out;
    std::string error;
};

using Handler = std::function<Json(const Json&)>;

// Parses and handles every line; schema problems are soft errors, anything
// else (oracle failures in particular) propagates as a hard error.
std::size_t process_jsonl(const std::vector<Line>& lines, std::size_t workers, const Handler& handle,
                          std::ostream& out, std::ostream& err)
{
    auto results = parallel_map(lines.size(), workers, [&](std::size_t i) -> Outcome {
        const Json j = Json::parse(lines[i].text, nullptr, false);
        if (j.is_discarded())
            return {std::nullopt, "malformed JSON"};
        if (!j.is_object())
            return {std::nullopt, "record must be a JSON object"};
        try {
            return {handle(j), {}};
        } catch (const SchemaError& e) {
            return {std::nullopt, e.what()};
        } catch (const std::invalid_argument& e) {
            return {std::nullopt, e.what()};
        } catch (const std::domain_error& e) {
            return {std::nullopt, e.what()};
        }
    });

    std::size_t soft = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].out) {
            out << results[i].out->dump() << '\n';
        } else {
            ++soft;
            err << "line " << lines[i].number << ": " << results[i].error << '\n';
        }
    }
    if (soft > 0)
        err << soft << " record(s) skipped\n";
    return soft;
}

void merge(Json& target, const Json& fields)
{
    for (const auto& [k, v] : fields.items())
        target[k] = v;
}

Json header(const Json& in)
{
    Json j;
    j["v"] = kSchemaVersion;
    if (in.contains("id"))
        j["id"] = in["id"];
    return j;
}

std::string require_string(const Json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_string())
        throw SchemaError(std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
}

const Json& require_array(const Json& j, const char* key)
{
    if (!j.contains(key) || !j[key].is_array())
        throw SchemaError(std::string("field '") + key + "' must be an array");
    return j[key];
}

std::string rollout_text(const Json& r)
{
    if (r.is_string())
        return r.get<std::string>();
    if (r.is_object() && r.contains("text") && r["text"].is_string())
        return r["text"].get<std::string>();
    throw SchemaError("each rollout must be a string or an object with a 'text' string");
}

RolloutGroup group_from_json(const Json& j, const ParseOptions& opts)
{
    RolloutGroup g;
    g.question = require_string(j, "question");
    g.gold_answer = require_string(j, "gold");
    for (const auto& r : require_array(j, "rollouts"))
        g.rollouts.push_back(parse_rollout(rollout_text(r), opts));
    if (g.rollouts.empty())
        throw SchemaError("field 'rollouts' must not be empty");
    return g;
}

std::vector<std::size_t> count_array(const Json& j, const char* key)
{
    std::vector<std::size_t> out;
    for (const auto& v : require_array(j, key)) {
        if (!v.is_number_unsigned())
            throw SchemaError(std::string("field '") + key + "' must hold non-negative integers");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

// Rebuilds a cluster assignment emitted by `cluster`, checking that sizes
// agree with membership.
ClusterAssignment clusters_from_json(const Json& j, std::size_t group_size)
{
    ClusterAssignment a;
    a.cluster_of = count_array(j, "cluster_of");
    a.sizes = count_array(j, "sizes");
    if (j.contains("degenerate")) {
        for (const auto& d : require_array(j, "degenerate")) {
            if (!d.is_boolean())
                throw SchemaError("field 'degenerate' must hold booleans");
            a.degenerate.push_back(d.get<bool>());
        }
    } else {
        a.degenerate.assign(a.sizes.size(), false);
    }
    if (a.cluster_of.size() != group_size)
        throw SchemaError("cluster_of length does not match the number of rollouts");
    if (a.degenerate.size() != a.sizes.size())
        throw SchemaError("degenerate length does not match sizes");
    std::vector<std::size_t> counted(a.sizes.size(), 0);
    for (auto c : a.cluster_of) {
        if (c >= a.sizes.size())
            throw SchemaError("cluster index out of range");
        ++counted[c];
    }
    if (counted != a.sizes)
        throw SchemaError("cluster sizes disagree with cluster_of");
    return a;
}

std::vector<double> number_array(const Json& j, const char* key)
{
    std::vector<double> out;
    for (const auto& v : require_array(j, key)) {
        if (!v.is_number())
            throw SchemaError(std::string("field '") + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Eigen::VectorXd to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// --------------------------------------------------------------------------
// Subcommand handlers

Json handle_parse(const Json& j, const ParseOptions& opts)
{
    Json out = header(j);
    if (j.contains("rollouts")) {
        out["question"] = require_string(j, "question");
        out["gold"] = require_string(j, "gold");
        Json rollouts = Json::array();
        for (const auto& r : require_array(j, "rollouts")) {
            const std::string text = rollout_text(r);
            Json parsed;
            parsed["text"] = text;
            merge(parsed, rollout_json(parse_rollout(text, opts)));
            rollouts.push_back(std::move(parsed));
        }
        out["rollouts"] = std::move(rollouts);
        return out;
    }
    merge(out, rollout_json(parse_rollout(require_string(j, "text"), opts)));
    return out;
}

Json handle_cluster(const Json& j, const ParseOptions& opts, const EntailmentOracle& oracle)
{
    const RolloutGroup g = group_from_json(j, opts);
    const ClusterAssignment a = cluster_group(g, oracle);
    Json out = header(j);
    out["question"] = g.question;
    out["gold"] = g.gold_answer;
    out["rollouts"] = j["rollouts"];
    merge(out, cluster_json(a));
    return out;
}

Json handle_reward(const Json& j, const ToolConfig& cfg, const ParseOptions& opts, const EntailmentOracle& oracle,
                   const AnswerMatcher& matcher)
{
    const RolloutGroup g = group_from_json(j, opts);
    const ClusterAssignment a =
        j.contains("cluster_of") ? clusters_from_json(j, g.rollouts.size()) : cluster_group(g, oracle);
    const auto rewards = score_group(g, a, cfg.weights, matcher, cfg.tau);

    Json out = header(j);
    out["question"] = g.question;
    out["gold"] = g.gold_answer;
    Json components = Json::array();
    std::vector<double> totals;
    for (const auto& r : rewards) {
        components.push_back(reward_vector_json(r));
        totals.push_back(r.total);
    }
    out["components"] = std::move(components);
    out["rewards"] = totals;
    return out;
}

Json handle_advantage(const Json& j, const ToolConfig& cfg)
{
    const Eigen::VectorXd rewards = to_vector(number_array(j, "rewards"));
    const auto set = normalize_advantages(rewards, cfg.grpo);

    Json out = header(j);
    out["rewards"] = to_std(set.rewards);
    out["mean"] = set.mean;
    out["std"] = set.std;
    out["degenerate"] = set.degenerate;
    out["advantages"] = to_std(set.advantages);

    const bool has_ratios = j.contains("ratios");
    if (has_ratios != j.contains("ref_ratios"))
        throw SchemaError("'ratios' and 'ref_ratios' must be given together");
    if (has_ratios) {
        const Eigen::VectorXd ratios = to_vector(number_array(j, "ratios"));
        const Eigen::VectorXd ref = to_vector(number_array(j, "ref_ratios"));
        const Eigen::VectorXd terms = objective_terms(ratios, ref, set.advantages, cfg.grpo);
        out["objective_terms"] = to_std(terms);
        out["objective"] = terms.mean();
    }
    return out;
}

Json handle_prepare(const Json& j, const Flags& f, const ToolConfig& cfg, const EntailmentOracle& oracle,
                    const AnswerMatcher& matcher)
{
    const QaRecord rec = qa_record_from_json(j);
    const std::span<const QaRecord> one(&rec, 1);
    Json out = Json{{"v", kSchemaVersion}};

    auto emit = [&](const Split& s, const char* first, const char* second) {
        if (s.skipped)
            throw SchemaError("record '" + rec.id + "' has no samples to work from");
        const bool is_first = !s.first.empty();
        merge(out, qa_record_json(is_first ? s.first.front() : s.second.front()));
        out["split"] = is_first ? first : second;
        return out;
    };

    if (f.mode == "filter")
        return emit(filter_low_entropy(one, cfg.entropy_threshold, oracle), "kept", "dropped");
    if (f.mode == "partition") {
        if (f.by == "entropy")
            return emit(partition_by_entropy(one, cfg.entropy_threshold, oracle), "known", "unknown");
        return emit(partition_by_correctness(one, matcher), "known", "unknown");
    }
    merge(out, qa_record_json(rewrite_unknown_labels(one, cfg.abstention_text).front()));
    return out;
}

// --------------------------------------------------------------------------

std::vector<Json> read_json_file(const std::string& path, const char* what, std::ostream& err, std::size_t& soft)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error(std::string("cannot read ") + what + " log '" + path + "'");
    std::vector<Json> out;
    for (const auto& line : read_lines(in)) {
        Json j = Json::parse(line.text, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            ++soft;
            err << what << " line " << line.number << ": malformed JSON\n";
            continue;
        }
        out.push_back(std::move(j));
    }
    return out;
}

int run_evaluate(const Flags& f, const ToolConfig& cfg, const EntailmentOracle& oracle, std::ostream& out,
                 std::ostream& err)
{
    const auto matcher = make_matcher(cfg, oracle);
    std::size_t soft = 0;
    std::vector<InitialEntry> initial;
    for (const auto& j : read_json_file(f.initial, "initial", err, soft)) {
        try {
            InitialEntry e;
            e.id = require_string(j, "id");
            e.question = j.contains("question") ? require_string(j, "question") : "";
            e.gold_answer = require_string(j, "gold");
            if (j.contains("correct")) {
                if (!j["correct"].is_boolean())
                    throw SchemaError("field 'correct' must be a boolean");
                e.correct = j["correct"].get<bool>();
            } else {
                e.correct = matcher->matches(require_string(j, "answer"), e.gold_answer);
            }
            initial.push_back(std::move(e));
        } catch (const SchemaError& e) {
            ++soft;
            err << "initial record: " << e.what() << '\n';
        }
    }
    std::vector<RefinedEntry> refined;
    for (const auto& j : read_json_file(f.refined, "refined", err, soft)) {
        try {
            refined.push_back({require_string(j, "id"), require_string(j, "text")});
        } catch (const SchemaError& e) {
            ++soft;
            err << "refined record: " << e.what() << '\n';
        }
    }

    const auto records = join_predictions(initial, refined, ParseOptions{cfg.lenient});
    const EvalResult result = build_confusion(records, *matcher, cfg.markers);
    for (const auto& id : result.inconsistent_ids)
        err << "record '" << id << "': unknown question answered correctly\n";

    Json report = Json{{"v", kSchemaVersion}};
    merge(report, metric_report_json(make_report(result.counts), f.percent ? 100.0 : 1.0));
    report["inconsistent_ids"] = result.inconsistent_ids;
    out << report.dump() << '\n';
    if (soft > 0)
        err << soft << " record(s) skipped\n";
    return kOk;
}

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--config", f.config, "flat JSON config file");
    sub->add_option("-i,--input", f.input, "input JSONL (default: stdin)");
    sub->add_option("-o,--output", f.output, "output file (default: stdout)");
    sub->add_option("--workers", f.workers, "worker threads");
    sub->add_flag("--lenient", f.lenient, "accept a repeated opening tag as the closing delimiter");
}

void add_oracle(CLI::App* sub, Flags& f)
{
    sub->add_option("--oracle", f.oracle, "entailment oracle: exact | remote");
    sub->add_option("--oracle-endpoint", f.oracle_endpoint, "entailment service base URL");
    sub->add_option("--oracle-timeout-ms", f.oracle_timeout_ms, "per-request timeout");
    sub->add_option("--oracle-retries", f.oracle_retries, "retries after a failed request");
    sub->add_option("--oracle-cache", f.oracle_cache, "append-only entailment cache file");
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
        const EnvLookup& env)
{
    Flags f;
    CLI::App app{"relkit: abstention reward and reliability evaluation over JSONL", "relkit"};
    app.require_subcommand(1);

    auto* parse = app.add_subcommand("parse", "parse rollouts and score their format");
    add_common(parse, f);

    auto* cluster = app.add_subcommand("cluster", "semantic clusters and entropy per rollout group");
    add_common(cluster, f);
    add_oracle(cluster, f);

    auto* reward = app.add_subcommand("reward", "confidence, accuracy, format and total rewards per rollout");
    add_common(reward, f);
    add_oracle(reward, f);
    reward->add_option("--matcher", f.matcher, "accuracy matcher: string | nli");
    reward->add_option("--num-generations", f.num_generations, "configured group size G");
    reward->add_option("--tau", f.tau, "abstention threshold (default ceil(G/2))");
    reward->add_option("--w-c", f.w_c, "confidence reward weight");
    reward->add_option("--w-a", f.w_a, "accuracy reward weight");
    reward->add_option("--w-f", f.w_f, "format reward weight");

    auto* advantage = app.add_subcommand("advantage", "group-normalized advantages and objective terms");
    add_common(advantage, f);
    advantage->add_option("--epsilon", f.epsilon, "clip ratio");
    advantage->add_option("--beta", f.beta, "KL coefficient");
    advantage->add_option("--std-floor", f.std_floor, "zero-variance floor");

    auto* prepare = app.add_subcommand("prepare", "training-set filtering, partitioning and relabeling");
    add_common(prepare, f);
    add_oracle(prepare, f);
    prepare->add_option("--mode", f.mode, "filter | partition | rewrite")
        ->required()
        ->check(CLI::IsMember({"filter", "partition", "rewrite"}));
    prepare->add_option("--by", f.by, "partition criterion: correctness | entropy")
        ->check(CLI::IsMember({"correctness", "entropy"}));
    prepare->add_option("--threshold", f.threshold, "entropy threshold in nats");
    prepare->add_option("--matcher", f.matcher, "answer matcher: string | nli");
    prepare->add_option("--abstention-text", f.abstention_text, "replacement gold answer");

    auto* evaluate = app.add_subcommand("evaluate", "abstention confusion matrix and reliability metrics");
    add_common(evaluate, f);
    add_oracle(evaluate, f);
    evaluate->add_option("--initial", f.initial, "initial-model log (JSONL)")->required();
    evaluate->add_option("--refined", f.refined, "refined-model log (JSONL)")->required();
    evaluate->add_option("--matcher", f.matcher, "answer matcher: string | nli");
    evaluate->add_option("--markers", f.markers, "comma-separated abstention markers");
    evaluate->add_flag("--percent", f.percent, "report metrics multiplied by 100");

    std::vector<const char*> argv{"relkit"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const ToolConfig cfg = resolve_config(f, env);
        if (prepare->parsed() && f.mode == "partition" && f.by == "entropy" && !f.threshold)
            throw ConfigError("--by entropy requires an explicit --threshold");
        const ParseOptions opts{cfg.lenient};

        std::unique_ptr<OracleStack> oracles;
        if (!parse->parsed() && !advantage->parsed())
            oracles = std::make_unique<OracleStack>(cfg);

        std::ofstream out_file;
        if (f.output) {
            out_file.open(*f.output);
            if (!out_file)
                throw std::runtime_error("cannot write '" + *f.output + "'");
        }
        std::ostream& sink = f.output ? static_cast<std::ostream&>(out_file) : out;

        if (evaluate->parsed())
            return run_evaluate(f, cfg, oracles->oracle(), sink, err);

        std::ifstream in_file;
        if (f.input) {
            in_file.open(*f.input);
            if (!in_file)
                throw std::runtime_error("cannot read '" + *f.input + "'");
        }
        const auto lines = read_lines(f.input ? static_cast<std::istream&>(in_file) : in);

        Handler handler;
        std::unique_ptr<AnswerMatcher> matcher;
        if (oracles)
            matcher = make_matcher(cfg, oracles->oracle());
        if (parse->parsed())
            handler = [&](const Json& j) { return handle_parse(j, opts); };
        else if (cluster->parsed())
            handler = [&](const Json& j) { return handle_cluster(j, opts, oracles->oracle()); };
        else if (reward->parsed())
            handler = [&](const Json& j) { return handle_reward(j, cfg, opts, oracles->oracle(), *matcher); };
        else if (advantage->parsed())
            handler = [&](const Json& j) { return handle_advantage(j, cfg); };
        else
            handler = [&](const Json& j) { return handle_prepare(j, f, cfg, oracles->oracle(), *matcher); };

        process_jsonl(lines, cfg.workers, handler, sink, err);
        return kOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const TransportError& e) {
        err << "oracle error: " << e.what() << " (attempts: " << e.attempts() << ")\n";
        return kOracle;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
}

} // namespace relkit::cli
