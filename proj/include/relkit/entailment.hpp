#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relkit {

enum class EntailmentLabel { Entailment, Neutral, Contradiction };

std::string_view to_string(EntailmentLabel l) noexcept;
std::optional<EntailmentLabel> parse_label(std::string_view s);

using TextPair = std::pair<std::string, std::string>;

/// Entailment backend could not be reached or answered garbage. Carries the
/// number of attempts made so callers can decide whether to retry later.
class TransportError : public std::runtime_error
{
  public:
    TransportError(const std::string& what, int attempts, int last_status)
        : std::runtime_error(what), attempts_(attempts), last_status_(last_status)
    {
    }

    int attempts() const noexcept { return attempts_; }
    /// HTTP status of the last attempt, 0 when no response was received.
    int last_status() const noexcept { return last_status_; }

  private:
    int attempts_;
    int last_status_;
};

/// Directional entailment oracle. Implementations must be safe for
/// concurrent calls.
class EntailmentOracle
{
  public:
    virtual ~EntailmentOracle() = default;

    virtual EntailmentLabel entails(std::string_view premise, std::string_view hypothesis) const = 0;

    /// Default loops over entails(); remote backends override with one round trip.
    virtual std::vector<EntailmentLabel> entails_batch(std::span<const TextPair> pairs) const;
};

/// Entailment iff both texts normalize to the same string, Neutral otherwise.
class ExactMatchOracle final : public EntailmentOracle
{
  public:
    EntailmentLabel entails(std::string_view premise, std::string_view hypothesis) const override;
};

struct HttpResponse
{
    int status = 0;  // 0 = no response (connection failure, timeout)
    std::string body;
};

class Transport
{
  public:
    virtual ~Transport() = default;
    virtual HttpResponse post_json(const std::string& path, const std::string& body) = 0;
    virtual HttpResponse get(const std::string& path) = 0;
};

/// cpp-httplib backed transport; opens a client per request.
class HttpTransport final : public Transport
{
  public:
    /// `endpoint` is scheme://host[:port], e.g. "http://127.0.0.1:8080".
    HttpTransport(std::string endpoint, std::chrono::milliseconds timeout);

    HttpResponse post_json(const std::string& path, const std::string& body) override;
    HttpResponse get(const std::string& path) override;

  private:
    std::string endpoint_;
    std::chrono::milliseconds timeout_;
};

/// Client for the entailment service wire protocol:
///   POST /v1/entails        {"premise","hypothesis"} -> {"label"}
///   POST /v1/entails_batch  {"pairs":[[p,h],...]}   -> {"labels":[...]}
///   GET  /healthz           -> 200
class RemoteOracle final : public EntailmentOracle
{
  public:
    RemoteOracle(std::shared_ptr<Transport> transport, int retries);

    EntailmentLabel entails(std::string_view premise, std::string_view hypothesis) const override;
    std::vector<EntailmentLabel> entails_batch(std::span<const TextPair> pairs) const override;

    bool healthy() const;

  private:
    std::string call(const std::string& path, const std::string& body) const;

    std::shared_ptr<Transport> transport_;
    int retries_;
};

/// Memoizes an inner oracle by the whitespace-normalized (premise, hypothesis)
/// pair. With a backing file, entries are loaded on construction and every
/// miss is appended as {"p_hash","h_hash","label"}.
class CachingOracle final : public EntailmentOracle
{
  public:
    explicit CachingOracle(const EntailmentOracle& inner, std::optional<std::filesystem::path> file = std::nullopt);

    EntailmentLabel entails(std::string_view premise, std::string_view hypothesis) const override;
    std::vector<EntailmentLabel> entails_batch(std::span<const TextPair> pairs) const override;

    std::size_t size() const;
    std::size_t hits() const noexcept { return hits_; }
    std::size_t misses() const noexcept { return misses_; }

  private:
    using Key = std::pair<std::string, std::string>;

    static Key key_of(std::string_view premise, std::string_view hypothesis);
    std::optional<EntailmentLabel> lookup(const Key& k) const;
    void store(const Key& k, EntailmentLabel label) const;

    const EntailmentOracle& inner_;
    std::optional<std::filesystem::path> file_;
    mutable std::shared_mutex mutex_;
    mutable std::map<Key, EntailmentLabel> entries_;
    mutable std::atomic<std::size_t> hits_{0};
    mutable std::atomic<std::size_t> misses_{0};
};

/// Hex SHA-256 of `s`.
std::string content_hash(std::string_view s);

struct EquivalenceQuery
{
    std::string question;  // empty in gold-answer matching mode
    std::string left_answer;
    std::string right_answer;
};

/// NLI input for one side of a query: "<question> <answer>".
std::string nli_input(std::string_view question, std::string_view answer);

/// Mutual entailment of the question-concatenated answers.
bool semantically_equivalent(const EquivalenceQuery& q, const EntailmentOracle& oracle);

/// Substring containment in either direction after normalization. Empty
/// strings never match.
bool match_bidirectional_string(std::string_view candidate, std::string_view gold);

/// Decides whether an extracted answer matches the gold answer.
class AnswerMatcher
{
  public:
    virtual ~AnswerMatcher() = default;
    virtual bool matches(std::string_view candidate, std::string_view gold) const = 0;
};

class StringMatcher final : public AnswerMatcher
{
  public:
    bool matches(std::string_view candidate, std::string_view gold) const override
    {
        return match_bidirectional_string(candidate, gold);
    }
};

/// Bidirectional entailment between candidate and gold, without a question prefix.
class NliMatcher final : public AnswerMatcher
{
  public:
    explicit NliMatcher(const EntailmentOracle& oracle) : oracle_(oracle) {}
    bool matches(std::string_view candidate, std::string_view gold) const override;

  private:
    const EntailmentOracle& oracle_;
};

} // namespace relkit
