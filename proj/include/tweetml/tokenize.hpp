#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "tweetml/corpus.hpp"

namespace tweetml {

namespace detail {

inline bool is_word_byte(unsigned char c) {
    // Bytes >= 0x80 belong to multi-byte UTF-8 sequences and stay inside words.
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

inline bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size())
        return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i])
            return false;
    return true;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Trailing characters peeled off URLs and e-mail addresses.
inline bool is_trailing_punct(char c) {
    return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':' || c == ')' ||
           c == '"' || c == '\'';
}

} // namespace detail

inline bool is_url(std::string_view token) {
    return detail::starts_with_ci(token, "http://") || detail::starts_with_ci(token, "https://") ||
           detail::starts_with_ci(token, "www.");
}

/// local@domain with exactly one '@', a non-empty local part, and a dotted
/// domain whose labels are non-empty.
inline bool is_email(std::string_view token) {
    const auto at = token.find('@');
    if (at == std::string_view::npos || at == 0 || token.find('@', at + 1) != std::string_view::npos)
        return false;
    const auto domain = token.substr(at + 1);
    const auto dot = domain.find('.');
    if (dot == std::string_view::npos || dot == 0 || domain.back() == '.')
        return false;
    return domain.find("..") == std::string_view::npos;
}

inline bool is_mention(std::string_view token) {
    return token.size() > 1 && token[0] == '@' && detail::is_word_byte(token[1]);
}

inline bool is_hashtag(std::string_view token) {
    return token.size() > 1 && token[0] == '#' && detail::is_word_byte(token[1]);
}

/// Case-preserving token scan. URLs, e-mail addresses, @mentions and
/// #hashtags come out whole; every other non-space byte that is not part of a
/// word becomes its own token.
inline std::vector<std::string> scan_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && detail::is_space_byte(text[pos]))
            ++pos;
        if (pos >= text.size())
            break;
        std::size_t end = pos;
        while (end < text.size() && !detail::is_space_byte(text[end]))
            ++end;
        std::string_view chunk = text.substr(pos, end - pos);
        pos = end;

        // Whole-chunk entities, with trailing punctuation split off.
        {
            std::size_t len = chunk.size();
            while (len > 0 && detail::is_trailing_punct(chunk[len - 1]))
                --len;
            auto core = chunk.substr(0, len);
            if (!core.empty() && (is_url(core) || (core[0] != '@' && is_email(core)))) {
                out.emplace_back(core);
                for (char c : chunk.substr(len))
                    out.emplace_back(1, c);
                continue;
            }
        }

        std::size_t i = 0;
        while (i < chunk.size()) {
            const auto c = static_cast<unsigned char>(chunk[i]);
            if ((c == '@' || c == '#') && i + 1 < chunk.size() &&
                detail::is_word_byte(chunk[i + 1])) {
                std::size_t j = i + 1;
                while (j < chunk.size() && detail::is_word_byte(chunk[j]))
                    ++j;
                out.emplace_back(chunk.substr(i, j - i));
                i = j;
            } else if (detail::is_word_byte(c)) {
                std::size_t j = i;
                // Apostrophes stay inside words ("don't").
                while (j < chunk.size() &&
                       (detail::is_word_byte(chunk[j]) ||
                        (chunk[j] == '\'' && j + 1 < chunk.size() &&
                         detail::is_word_byte(chunk[j + 1]) && j > i)))
                    ++j;
                out.emplace_back(chunk.substr(i, j - i));
                i = j;
            } else {
                out.emplace_back(1, chunk[i]);
                ++i;
            }
        }
    }
    return out;
}

/// Lowercased tokens for n-gram features.
inline std::vector<std::string> tokenize(std::string_view text) {
    auto tokens = scan_tokens(text);
    for (auto& t : tokens)
        t = detail::to_lower(t);
    return tokens;
}

namespace pos {
inline constexpr std::string_view hashtag = "hashtag";
inline constexpr std::string_view mention = "mention";
inline constexpr std::string_view url = "url";
inline constexpr std::string_view email = "email";
inline constexpr std::string_view punct = "punct";
inline constexpr std::string_view number = "number";
inline constexpr std::string_view word = "word";
} // namespace pos

/// Coarse rule-based tagger used when a tweet carries no precomputed tags.
/// It is an approximation of a real Twitter POS tagger, not a substitute.
inline std::vector<PosTag> fallback_pos_tag(const std::vector<std::string>& tokens) {
    std::vector<PosTag> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        std::string_view tag = pos::word;
        if (is_hashtag(t))
            tag = pos::hashtag;
        else if (is_mention(t))
            tag = pos::mention;
        else if (is_url(t))
            tag = pos::url;
        else if (is_email(t))
            tag = pos::email;
        else if (!t.empty() && !detail::is_word_byte(t[0]))
            tag = pos::punct;
        else if (!t.empty() && t.find_first_not_of("0123456789.,") == std::string::npos)
            tag = pos::number;
        out.push_back({t, std::string(tag)});
    }
    return out;
}

} // namespace tweetml
