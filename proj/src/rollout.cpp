#include "relkit/rollout.hpp"

#include "relkit/text.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace relkit {

namespace {

struct TagHit
{
    Tag tag;
    std::size_t begin;  // offset of '<'
    std::size_t end;    // one past '>'
};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool iequals_at(std::string_view s, std::size_t pos, std::string_view word)
{
    if (pos + word.size() > s.size())
        return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != word[i])
            return false;
    }
    return true;
}

// Matches `<` ws? `/`? ws? (answer|confidence) ws? `>` starting at `pos`.
std::optional<TagHit> match_tag(std::string_view s, std::size_t pos)
{
    std::size_t i = pos + 1;
    auto skip_ws = [&] {
        while (i < s.size() && is_space(s[i]))
            ++i;
    };
    skip_ws();
    bool closing = false;
    if (i < s.size() && s[i] == '/') {
        closing = true;
        ++i;
        skip_ws();
    }
    Tag tag;
    if (iequals_at(s, i, "answer")) {
        tag = closing ? Tag::AnswerClose : Tag::AnswerOpen;
        i += 6;
    } else if (iequals_at(s, i, "confidence")) {
        tag = closing ? Tag::ConfidenceClose : Tag::ConfidenceOpen;
        i += 10;
    } else {
        return std::nullopt;
    }
    skip_ws();
    if (i >= s.size() || s[i] != '>')
        return std::nullopt;
    return TagHit{tag, pos, i + 1};
}

std::vector<TagHit> scan_tags(std::string_view s)
{
    std::vector<TagHit> hits;
    for (std::size_t pos = s.find('<'); pos != std::string_view::npos; pos = s.find('<', pos + 1)) {
        if (auto hit = match_tag(s, pos)) {
            hits.push_back(*hit);
            pos = hit->end - 1;
        }
    }
    return hits;
}

std::size_t idx(Tag t) { return static_cast<std::size_t>(t); }

const TagHit* first_of(const std::vector<TagHit>& hits, Tag t, std::size_t after = 0)
{
    for (const auto& h : hits) {
        if (h.tag == t && h.begin >= after)
            return &h;
    }
    return nullptr;
}

// Body between the first opener and the first closer after it. In lenient
// mode a second opener stands in for a missing closer.
std::optional<std::string_view> block_body(std::string_view s, const std::vector<TagHit>& hits, Tag open,
                                           Tag close, bool lenient)
{
    const TagHit* o = first_of(hits, open);
    if (!o)
        return std::nullopt;
    const TagHit* c = first_of(hits, close, o->end);
    if (!c && lenient)
        c = first_of(hits, open, o->end);
    if (!c)
        return std::nullopt;
    return s.substr(o->end, c->begin - o->end);
}

FormatBreakdown score_format(const std::vector<TagHit>& hits)
{
    FormatBreakdown f;
    for (const auto& h : hits)
        ++f.counts[idx(h.tag)];

    auto pair_credit = [&](Tag open, Tag close) {
        const TagHit* o = first_of(hits, open);
        const TagHit* c = first_of(hits, close);
        // opener: unique, with a closer somewhere after it
        f.credited[idx(open)] = f.counts[idx(open)] == 1 && first_of(hits, close, o->end) != nullptr;
        // closer: unique, and not preceding every opener
        f.credited[idx(close)] = f.counts[idx(close)] == 1 && (o == nullptr || o->begin < c->begin);
    };
    pair_credit(Tag::AnswerOpen, Tag::AnswerClose);
    pair_credit(Tag::ConfidenceOpen, Tag::ConfidenceClose);

    const bool all_unique = std::all_of(f.counts.begin(), f.counts.end(), [](std::size_t n) { return n == 1; });
    if (all_unique) {
        const auto pos = [&](Tag t) { return first_of(hits, t)->begin; };
        f.ordered = pos(Tag::AnswerOpen) < pos(Tag::AnswerClose) && pos(Tag::AnswerClose) < pos(Tag::ConfidenceOpen) &&
                    pos(Tag::ConfidenceOpen) < pos(Tag::ConfidenceClose);
    }
    return f;
}

} // namespace

std::string_view to_string(Confidence c) noexcept { return c == Confidence::Sure ? "sure" : "unsure"; }

std::optional<Confidence> parse_confidence(std::string_view body)
{
    const std::string v = text::to_lower(text::trim(body));
    if (v == "sure")
        return Confidence::Sure;
    if (v == "unsure")
        return Confidence::Unsure;
    return std::nullopt;
}

std::size_t FormatBreakdown::credited_count() const noexcept
{
    return static_cast<std::size_t>(std::count(credited.begin(), credited.end(), true));
}

Rollout parse_rollout(std::string_view raw, const ParseOptions& opts)
{
    Rollout r;
    r.raw = std::string(raw);
    const auto hits = scan_tags(raw);

    if (auto body = block_body(raw, hits, Tag::AnswerOpen, Tag::AnswerClose, opts.lenient)) {
        std::string a = text::trim(*body);
        if (!a.empty())
            r.answer = std::move(a);
    }
    if (auto body = block_body(raw, hits, Tag::ConfidenceOpen, Tag::ConfidenceClose, opts.lenient))
        r.confidence = parse_confidence(*body);

    r.format = score_format(hits);
    // a full score also needs a sure/unsure body; tag credit is kept either way
    r.format.ordered = r.format.ordered && r.confidence.has_value();
    return r;
}

double format_reward(const Rollout& r) noexcept
{
    return kTagCredit * static_cast<double>(r.format.credited_count()) + (r.format.ordered ? kOrderBonus : 0.0);
}

std::string render_rollout(std::string_view answer, Confidence c)
{
    std::string out = "<answer> ";
    out += answer;
    out += " </answer>\n<confidence> ";
    out += to_string(c);
    out += " </confidence>";
    return out;
}

} // namespace relkit
