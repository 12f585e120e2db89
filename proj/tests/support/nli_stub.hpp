#pragma once

#include "relkit/entailment.hpp"
#include "relkit/text.hpp"

#include "httplib.h"
#include "json.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>

namespace relkit::test {

using ReplayTable = std::map<std::pair<std::string, std::string>, std::string>;

inline std::string data_path(const std::string& name) { return std::string(RELKIT_TEST_DATA_DIR) + "/" + name; }

/// Recorded (premise, hypothesis) -> label pairs.
inline ReplayTable load_replay(const std::string& path = data_path("fixtures/nli_replay.jsonl"))
{
    ReplayTable t;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto j = nlohmann::json::parse(line);
        t[{j["premise"].get<std::string>(), j["hypothesis"].get<std::string>()}] = j["label"].get<std::string>();
    }
    return t;
}

inline std::string replay_label(const ReplayTable& t, const std::string& p, const std::string& h)
{
    auto it = t.find({p, h});
    return it == t.end() ? "neutral" : it->second;
}

/// In-process transport answering from a replay table; counts round trips.
class ReplayTransport final : public Transport
{
  public:
    explicit ReplayTransport(ReplayTable table) : table_(std::move(table)) {}

    HttpResponse post_json(const std::string& path, const std::string& body) override
    {
        ++posts;
        const auto req = nlohmann::json::parse(body);
        if (path == "/v1/entails")
            return {200, nlohmann::json{{"label", replay_label(table_, req["premise"], req["hypothesis"])}}.dump()};
        if (path == "/v1/entails_batch") {
            nlohmann::json labels = nlohmann::json::array();
            for (const auto& pair : req["pairs"])
                labels.push_back(replay_label(table_, pair[0], pair[1]));
            return {200, nlohmann::json{{"labels", labels}}.dump()};
        }
        return {404, ""};
    }

    HttpResponse get(const std::string& path) override { return {path == "/healthz" ? 200 : 404, ""}; }

    std::atomic<int> posts{0};

  private:
    ReplayTable table_;
};

/// Local HTTP server speaking the entailment wire protocol from a replay
/// table. The first `fail_first` POSTs answer 503.
class StubServer
{
  public:
    explicit StubServer(ReplayTable table, int fail_first = 0) : table_(std::move(table)), fail_first_(fail_first)
    {
        server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"status":"ok"})", "application/json");
        });
        server_.Post("/v1/entails", [this](const httplib::Request& req, httplib::Response& res) {
            if (should_fail(res))
                return;
            const auto j = nlohmann::json::parse(req.body, nullptr, false);
            if (j.is_discarded() || !j.contains("premise") || !j.contains("hypothesis")) {
                res.status = 400;
                return;
            }
            res.set_content(nlohmann::json{{"label", replay_label(table_, j["premise"], j["hypothesis"])}}.dump(),
                            "application/json");
        });
        server_.Post("/v1/entails_batch", [this](const httplib::Request& req, httplib::Response& res) {
            if (should_fail(res))
                return;
            const auto j = nlohmann::json::parse(req.body, nullptr, false);
            if (j.is_discarded() || !j.contains("pairs")) {
                res.status = 400;
                return;
            }
            nlohmann::json labels = nlohmann::json::array();
            for (const auto& pair : j["pairs"])
                labels.push_back(replay_label(table_, pair[0], pair[1]));
            res.set_content(nlohmann::json{{"labels", labels}}.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer()
    {
        server_.stop();
        thread_.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int posts() const { return posts_; }

  private:
    bool should_fail(httplib::Response& res)
    {
        if (posts_++ < fail_first_) {
            res.status = 503;
            return true;
        }
        return false;
    }

    ReplayTable table_;
    int fail_first_;
    std::atomic<int> posts_{0};
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

/// Test oracle over explicit equivalence classes of normalized answers,
/// applied to the text after the question prefix is stripped.
class TableOracle final : public EntailmentOracle
{
  public:
    TableOracle(std::string question, std::vector<std::set<std::string>> classes)
        : question_(text::normalize(question)), classes_(std::move(classes))
    {
    }

    EntailmentLabel entails(std::string_view premise, std::string_view hypothesis) const override
    {
        ++calls;
        const std::string p = strip(premise), h = strip(hypothesis);
        if (p == h)
            return EntailmentLabel::Entailment;
        for (const auto& c : classes_) {
            if (c.count(p) && c.count(h))
                return EntailmentLabel::Entailment;
        }
        return EntailmentLabel::Neutral;
    }

    mutable std::atomic<int> calls{0};

  private:
    std::string strip(std::string_view s) const
    {
        std::string n = text::normalize(s);
        if (!question_.empty() && n.rfind(question_, 0) == 0)
            n = text::normalize(n.substr(question_.size()));
        return n;
    }

    std::string question_;
    std::vector<std::set<std::string>> classes_;
};

} // namespace relkit::test
