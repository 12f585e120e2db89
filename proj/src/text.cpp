#include "relkit/text.hpp"

#include <cctype>

namespace relkit::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

} // namespace

std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b]))
        ++b;
    while (e > b && is_space(s[e - 1]))
        --e;
    return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string collapse_whitespace(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (char c : s) {
        if (is_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending)
            out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

std::string normalize(std::string_view s)
{
    std::string out = collapse_whitespace(to_lower(s));
    std::size_t b = 0, e = out.size();
    // punctuation and whitespace interleave at the edges, e.g. "maid ."
    while (b < e && (is_punct(out[b]) || is_space(out[b])))
        ++b;
    while (e > b && (is_punct(out[e - 1]) || is_space(out[e - 1])))
        --e;
    return out.substr(b, e - b);
}

} // namespace relkit::text
