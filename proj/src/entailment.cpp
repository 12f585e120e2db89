#include "relkit/entailment.hpp"

#include "relkit/text.hpp"

#include "httplib.h"
#include "json.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <thread>

namespace relkit {

using nlohmann::json;

std::string_view to_string(EntailmentLabel l) noexcept
{
    switch (l) {
    case EntailmentLabel::Entailment:
        return "entailment";
    case EntailmentLabel::Neutral:
        return "neutral";
    case EntailmentLabel::Contradiction:
        return "contradiction";
    }
    return "neutral";
}

std::optional<EntailmentLabel> parse_label(std::string_view s)
{
    const std::string v = text::to_lower(text::trim(s));
    if (v == "entailment")
        return EntailmentLabel::Entailment;
    if (v == "neutral")
        return EntailmentLabel::Neutral;
    if (v == "contradiction")
        return EntailmentLabel::Contradiction;
    return std::nullopt;
}

std::vector<EntailmentLabel> EntailmentOracle::entails_batch(std::span<const TextPair> pairs) const
{
    std::vector<EntailmentLabel> out;
    out.reserve(pairs.size());
    for (const auto& [p, h] : pairs)
        out.push_back(entails(p, h));
    return out;
}

EntailmentLabel ExactMatchOracle::entails(std::string_view premise, std::string_view hypothesis) const
{
    const std::string p = text::normalize(premise);
    const std::string h = text::normalize(hypothesis);
    if (p.empty() || h.empty())
        throw std::invalid_argument("entails: premise and hypothesis must be non-empty");
    return p == h ? EntailmentLabel::Entailment : EntailmentLabel::Neutral;
}

// --------------------------------------------------------------------------
// HTTP transport

HttpTransport::HttpTransport(std::string endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout)
{
}

namespace {

void configure(httplib::Client& cli, std::chrono::milliseconds timeout)
{
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
}

} // namespace

HttpResponse HttpTransport::post_json(const std::string& path, const std::string& body)
{
    httplib::Client cli(endpoint_);
    configure(cli, timeout_);
    auto res = cli.Post(path, body, "application/json");
    if (!res)
        return {};
    return {res->status, res->body};
}

HttpResponse HttpTransport::get(const std::string& path)
{
    httplib::Client cli(endpoint_);
    configure(cli, timeout_);
    auto res = cli.Get(path);
    if (!res)
        return {};
    return {res->status, res->body};
}

// --------------------------------------------------------------------------
// Remote oracle

RemoteOracle::RemoteOracle(std::shared_ptr<Transport> transport, int retries)
    : transport_(std::move(transport)), retries_(retries < 0 ? 0 : retries)
{
}

std::string RemoteOracle::call(const std::string& path, const std::string& body) const
{
    const int max_attempts = retries_ + 1;
    HttpResponse res;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        res = transport_->post_json(path, body);
        if (res.status == 200)
            return res.body;
        // client errors will not improve on retry
        if (res.status >= 400 && res.status < 500)
            throw TransportError(path + ": HTTP " + std::to_string(res.status), attempt, res.status);
        if (attempt < max_attempts)
            std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    }
    const std::string why = res.status == 0 ? "no response" : "HTTP " + std::to_string(res.status);
    throw TransportError(path + ": " + why + " after " + std::to_string(max_attempts) + " attempt(s)", max_attempts,
                         res.status);
}

namespace {

EntailmentLabel label_from_json(const json& j, const std::string& path)
{
    if (!j.is_string())
        throw TransportError(path + ": label is not a string", 1, 200);
    auto l = parse_label(j.get<std::string>());
    if (!l)
        throw TransportError(path + ": unknown label '" + j.get<std::string>() + "'", 1, 200);
    return *l;
}

} // namespace

EntailmentLabel RemoteOracle::entails(std::string_view premise, std::string_view hypothesis) const
{
    const std::string path = "/v1/entails";
    const json req = {{"premise", std::string(premise)}, {"hypothesis", std::string(hypothesis)}};
    const std::string body = call(path, req.dump());
    const json res = json::parse(body, nullptr, false);
    if (res.is_discarded() || !res.contains("label"))
        throw TransportError(path + ": malformed response", 1, 200);
    return label_from_json(res["label"], path);
}

std::vector<EntailmentLabel> RemoteOracle::entails_batch(std::span<const TextPair> pairs) const
{
    if (pairs.empty())
        return {};
    const std::string path = "/v1/entails_batch";
    json arr = json::array();
    for (const auto& [p, h] : pairs)
        arr.push_back({p, h});
    const std::string body = call(path, json{{"pairs", arr}}.dump());
    const json res = json::parse(body, nullptr, false);
    if (res.is_discarded() || !res.contains("labels") || !res["labels"].is_array() ||
        res["labels"].size() != pairs.size())
        throw TransportError(path + ": malformed response", 1, 200);
    std::vector<EntailmentLabel> out;
    out.reserve(pairs.size());
    for (const auto& l : res["labels"])
        out.push_back(label_from_json(l, path));
    return out;
}

bool RemoteOracle::healthy() const { return transport_->get("/healthz").status == 200; }

// --------------------------------------------------------------------------
// Cache

std::string content_hash(std::string_view s)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(s.data(), s.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("content_hash: EVP_Digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

CachingOracle::CachingOracle(const EntailmentOracle& inner, std::optional<std::filesystem::path> file)
    : inner_(inner), file_(std::move(file))
{
    if (!file_)
        return;
    std::ifstream in(*file_);
    std::string line;
    while (std::getline(in, line)) {
        const json j = json::parse(line, nullptr, false);
        // a torn final line from an interrupted append is skipped
        if (j.is_discarded() || !j.contains("p_hash") || !j.contains("h_hash") || !j.contains("label"))
            continue;
        auto label = parse_label(j["label"].get<std::string>());
        if (label)
            entries_[{j["p_hash"].get<std::string>(), j["h_hash"].get<std::string>()}] = *label;
    }
}

CachingOracle::Key CachingOracle::key_of(std::string_view premise, std::string_view hypothesis)
{
    return {content_hash(text::collapse_whitespace(premise)), content_hash(text::collapse_whitespace(hypothesis))};
}

std::optional<EntailmentLabel> CachingOracle::lookup(const Key& k) const
{
    std::shared_lock lock(mutex_);
    auto it = entries_.find(k);
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

void CachingOracle::store(const Key& k, EntailmentLabel label) const
{
    std::unique_lock lock(mutex_);
    if (!entries_.emplace(k, label).second)
        return;
    if (file_) {
        std::ofstream out(*file_, std::ios::app);
        out << json{{"p_hash", k.first}, {"h_hash", k.second}, {"label", to_string(label)}}.dump() << '\n';
    }
}

EntailmentLabel CachingOracle::entails(std::string_view premise, std::string_view hypothesis) const
{
    const Key k = key_of(premise, hypothesis);
    if (auto hit = lookup(k)) {
        ++hits_;
        return *hit;
    }
    ++misses_;
    const EntailmentLabel label = inner_.entails(premise, hypothesis);
    store(k, label);
    return label;
}

std::vector<EntailmentLabel> CachingOracle::entails_batch(std::span<const TextPair> pairs) const
{
    std::vector<EntailmentLabel> out(pairs.size());
    std::vector<Key> keys;
    std::vector<std::size_t> missing;
    std::vector<TextPair> missing_pairs;
    keys.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        keys.push_back(key_of(pairs[i].first, pairs[i].second));
        if (auto hit = lookup(keys.back())) {
            ++hits_;
            out[i] = *hit;
        } else {
            ++misses_;
            missing.push_back(i);
            missing_pairs.push_back(pairs[i]);
        }
    }
    if (!missing.empty()) {
        const auto labels = inner_.entails_batch(missing_pairs);
        for (std::size_t j = 0; j < missing.size(); ++j) {
            out[missing[j]] = labels[j];
            store(keys[missing[j]], labels[j]);
        }
    }
    return out;
}

std::size_t CachingOracle::size() const
{
    std::shared_lock lock(mutex_);
    return entries_.size();
}

// --------------------------------------------------------------------------
// Equivalence and matching

std::string nli_input(std::string_view question, std::string_view answer)
{
    const std::string q = text::trim(question);
    const std::string a = text::trim(answer);
    if (q.empty())
        return a;
    return q + " " + a;
}

bool semantically_equivalent(const EquivalenceQuery& q, const EntailmentOracle& oracle)
{
    if (text::trim(q.left_answer).empty() || text::trim(q.right_answer).empty())
        throw std::invalid_argument("semantically_equivalent: answers must be non-empty");
    const std::string left = nli_input(q.question, q.left_answer);
    const std::string right = nli_input(q.question, q.right_answer);
    if (oracle.entails(left, right) != EntailmentLabel::Entailment)
        return false;
    return oracle.entails(right, left) == EntailmentLabel::Entailment;
}

bool match_bidirectional_string(std::string_view candidate, std::string_view gold)
{
    const std::string c = text::normalize(candidate);
    const std::string g = text::normalize(gold);
    if (c.empty() || g.empty())
        return false;
    return c.find(g) != std::string::npos || g.find(c) != std::string::npos;
}

bool NliMatcher::matches(std::string_view candidate, std::string_view gold) const
{
    if (text::trim(candidate).empty() || text::trim(gold).empty())
        return false;
    return semantically_equivalent(EquivalenceQuery{"", std::string(candidate), std::string(gold)}, oracle_);
}

} // namespace relkit
