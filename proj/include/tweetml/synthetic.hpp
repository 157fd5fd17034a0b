#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "tweetml/corpus.hpp"
#include "tweetml/labels.hpp"
#include "tweetml/random.hpp"

namespace tweetml::synthetic {

struct Options {
    std::size_t count = 1000;
    std::uint64_t seed = 7;
    // Probability that a tweet carries no keyword for its purpose / position.
    double missing_purpose = 0.08;
    double missing_position = 0.10;
    // Probability of one keyword from a wrong label.
    double distractor = 0.15;
};

namespace detail {

using Words = std::vector<std::string_view>;

inline const std::array<Words, kLabelCount>& keywords() {
    static const std::array<Words, kLabelCount> k{{
        {"love", "hate", "ugh", "sad", "angry", "happy", "tired", "honestly", "omg"},
        {"report", "news", "study", "article", "announced", "breaking", "update", "data", "read"},
        {"you", "thanks", "agree", "reply", "dear", "hey", "please", "friends", "asking"},
        {"support", "great", "finally", "good", "needed", "right", "justice", "deserve", "win"},
        {"against", "terrible", "repeal", "bad", "wrong", "disaster", "stop", "failed", "cruel"},
        {"maybe", "unsure", "mixed", "debate", "wonder", "both", "sides", "undecided", "perhaps"},
    }};
    return k;
}

inline const Words& topic_words() {
    static const Words w{"obamacare", "healthcare", "law", "policy", "insurance",
                         "congress",  "senate",     "bill", "coverage", "premiums"};
    return w;
}

inline const Words& filler_words() {
    static const Words w{"the",  "a",    "is",   "it",    "this", "that", "of",   "and",
                         "to",   "in",   "for",  "on",    "with", "just", "so",   "about",
                         "what", "all",  "they", "their", "was",  "be",   "been", "now",
                         "some", "more", "very", "when",  "then", "out",  "who",  "how"};
    return w;
}

// Joint purpose x position counts (rows express_emotion, information_sharing,
// social_interaction; columns pro, con, neutral) used to correlate the groups.
inline constexpr std::array<std::array<std::size_t, 3>, 3> kJointCounts{{
    {106, 190, 56},
    {236, 149, 92},
    {44, 84, 43},
}};

inline std::string_view pick(const Words& w, Rng& rng) {
    return w[static_cast<std::size_t>(uniform_below(rng, w.size()))];
}

inline std::pair<std::size_t, std::size_t> draw_pair(Rng& rng) {
    std::size_t total = 0;
    for (const auto& row : kJointCounts)
        for (auto c : row)
            total += c;
    auto r = static_cast<std::size_t>(uniform_below(rng, total));
    for (std::size_t p = 0; p < 3; ++p)
        for (std::size_t q = 0; q < 3; ++q) {
            if (r < kJointCounts[p][q])
                return {p, q};
            r -= kJointCounts[p][q];
        }
    return {0, 0};
}

} // namespace detail

/// Labeled tweets with planted keyword signals for each purpose and position
/// label, purpose-dependent Twitter signals (mentions, links, exclamation
/// marks), and correlated purpose/position frequencies.
inline Dataset generate(const Options& opts) {
    using namespace detail;
    Rng rng(opts.seed);
    std::vector<Tweet> tweets;
    tweets.reserve(opts.count);
    for (std::size_t n = 0; n < opts.count; ++n) {
        const auto [purpose, position] = draw_pair(rng);
        std::vector<std::string> words;

        const auto add_keywords = [&](std::size_t label, double missing) {
            if (uniform_unit(rng) < missing)
                return;
            const auto reps = 1 + uniform_below(rng, 2);
            for (std::uint64_t i = 0; i < reps; ++i)
                words.emplace_back(pick(keywords()[label], rng));
        };
        add_keywords(purpose, opts.missing_purpose);
        add_keywords(kPositionOffset + position, opts.missing_position);
        if (uniform_unit(rng) < opts.distractor)
            words.emplace_back(pick(keywords()[uniform_below(rng, kLabelCount)], rng));
        for (int i = 0; i < 2; ++i)
            words.emplace_back(pick(topic_words(), rng));
        const auto fill = 2 + uniform_below(rng, 4);
        for (std::uint64_t i = 0; i < fill; ++i)
            words.emplace_back(pick(filler_words(), rng));
        shuffle(words, rng);

        std::string text;
        const auto append = [&](std::string_view w) {
            if (!text.empty())
                text.push_back(' ');
            text.append(w);
        };
        char buf[48];
        if (purpose == 1 && uniform_unit(rng) < 0.15)
            append("RT");
        if (purpose == 2 && uniform_unit(rng) < 0.8) {
            std::snprintf(buf, sizeof buf, "@user%u", static_cast<unsigned>(uniform_below(rng, 50)));
            append(buf);
        }
        for (const auto& w : words)
            append(w);
        if (purpose == 0 && uniform_unit(rng) < 0.6)
            text.push_back('!');
        if (purpose == 2 && uniform_unit(rng) < 0.4)
            text.push_back('?');
        if (purpose == 1 && uniform_unit(rng) < 0.7) {
            std::snprintf(buf, sizeof buf, "http://t.co/%06u",
                          static_cast<unsigned>(uniform_below(rng, 1000000)));
            append(buf);
        }
        if (uniform_unit(rng) < 0.3)
            append(uniform_unit(rng) < 0.5 ? "#obamacare" : "#healthcare");

        std::snprintf(buf, sizeof buf, "syn-%05zu", n);
        tweets.push_back({buf, text, std::nullopt, LabelVector::from_pair(purpose, position)});
    }
    return Dataset(std::move(tweets));
}

} // namespace tweetml::synthetic
