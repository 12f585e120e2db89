#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace relkit {

enum class Confidence { Sure, Unsure };

std::string_view to_string(Confidence c) noexcept;
std::optional<Confidence> parse_confidence(std::string_view body);

/// The four format tags, in template order.
enum class Tag : std::size_t { AnswerOpen = 0, AnswerClose, ConfidenceOpen, ConfidenceClose };

inline constexpr double kTagCredit = 0.125;
inline constexpr double kOrderBonus = 0.5;

struct FormatBreakdown
{
    std::array<std::size_t, 4> counts{};  // occurrences of each tag
    std::array<bool, 4> credited{};       // tag used correctly
    bool ordered = false;                 // every tag once, answer block first, sure/unsure body

    std::size_t credited_count() const noexcept;
};

/// One parsed model sample.
struct Rollout
{
    std::string raw;
    std::optional<std::string> answer;
    std::optional<Confidence> confidence;
    FormatBreakdown format;
};

struct ParseOptions
{
    /// Accept a repeated opening tag as the closing delimiter, e.g.
    /// "<answer> maid <answer>". Affects extraction only, never format credit.
    bool lenient = false;
};

/// Total function: malformed parts yield absent fields, never an error.
Rollout parse_rollout(std::string_view raw, const ParseOptions& opts = {});

/// 0.125 per correctly used tag plus 0.5 for the full ordered template.
double format_reward(const Rollout& r) noexcept;

/// Canonical training-template rendering of an answer/confidence pair.
std::string render_rollout(std::string_view answer, Confidence c);

} // namespace relkit
