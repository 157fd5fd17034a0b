#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tweetml/corpus.hpp"
#include "tweetml/error.hpp"
#include "tweetml/random.hpp"
#include "tweetml/sparse.hpp"
#include "tweetml/tokenize.hpp"

namespace tweetml {

enum class FeatureKind : std::uint8_t { unigram, bigram, punctuation, pos_tag, twitter };

inline std::string_view to_string(FeatureKind k) {
    switch (k) {
    case FeatureKind::unigram: return "unigram";
    case FeatureKind::bigram: return "bigram";
    case FeatureKind::punctuation: return "punctuation";
    case FeatureKind::pos_tag: return "pos_tag";
    case FeatureKind::twitter: return "twitter";
    }
    return "?";
}

inline FeatureKind feature_kind_from_string(std::string_view s) {
    for (auto k : {FeatureKind::unigram, FeatureKind::bigram, FeatureKind::punctuation,
                   FeatureKind::pos_tag, FeatureKind::twitter})
        if (to_string(k) == s)
            return k;
    throw Error("unknown feature kind '" + std::string(s) + "'");
}

struct FeatureDescriptor {
    FeatureKind kind;
    std::string key;

    auto operator<=>(const FeatureDescriptor&) const = default;
};

inline constexpr std::array<std::string_view, 3> kPunctuationMarks{"!", "?", ":"};
inline constexpr std::array<std::string_view, 4> kTwitterSignals{
    "hashtag_count", "mention_count", "retweet_present", "hyperlink_count"};

/// Which feature families are enabled, plus n-gram pruning thresholds.
struct FeatureConfig {
    std::string name = "f5";
    bool unigrams = true;
    bool bigrams = true;
    bool pos = true;
    bool stat = true; // punctuation + Twitter-specific counts
    std::size_t min_unigram_count = 2;
    std::size_t min_bigram_count = 4;

    friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;

    /// f1 unigram, f2 bigram, f3 uni+bigram, f4 f3+POS, f5 f4+STAT.
    static FeatureConfig preset(std::string_view name) {
        FeatureConfig c;
        c.name = std::string(name);
        if (name == "f1") {
            c.bigrams = c.pos = c.stat = false;
        } else if (name == "f2") {
            c.unigrams = c.pos = c.stat = false;
        } else if (name == "f3") {
            c.pos = c.stat = false;
        } else if (name == "f4") {
            c.stat = false;
        } else if (name != "f5") {
            throw ValidationError("unknown feature preset '" + std::string(name) +
                                  "' (expected f1..f5)");
        }
        return c;
    }

    static bool is_preset_name(std::string_view name) {
        return name == "f1" || name == "f2" || name == "f3" || name == "f4" || name == "f5";
    }
};

struct VocabularyStats {
    std::size_t unigram_candidates = 0;
    std::size_t unigram_admitted = 0;
    std::size_t bigram_candidates = 0;
    std::size_t bigram_admitted = 0;
    std::size_t pos_tags = 0;
    std::size_t fallback_tagged_tweets = 0;
};

/// Frozen descriptor -> dense index mapping. Built once from training data;
/// lookups never grow it.
class Vocabulary {
public:
    using Index = FeatureVector::Index;

    Vocabulary() = default;

    Vocabulary(FeatureConfig config, std::vector<FeatureDescriptor> descriptors,
               std::map<FeatureDescriptor, std::size_t> counts, VocabularyStats stats = {})
        : config_(std::move(config)), descriptors_(std::move(descriptors)),
          counts_(std::move(counts)), stats_(stats) {
        for (std::size_t i = 0; i < descriptors_.size(); ++i)
            if (!index_of_.emplace(descriptors_[i], static_cast<Index>(i)).second)
                throw Error("duplicate feature descriptor '" + descriptors_[i].key + "'");
    }

    std::optional<Index> lookup(const FeatureDescriptor& d) const {
        auto it = index_of_.find(d);
        if (it == index_of_.end())
            return std::nullopt;
        return it->second;
    }
    std::optional<Index> lookup(FeatureKind kind, std::string_view key) const {
        return lookup(FeatureDescriptor{kind, std::string(key)});
    }

    std::size_t dimension() const { return descriptors_.size(); }
    const std::vector<FeatureDescriptor>& descriptors() const { return descriptors_; }
    const FeatureDescriptor& descriptor(Index i) const { return descriptors_.at(i); }
    const FeatureConfig& config() const { return config_; }
    const VocabularyStats& stats() const { return stats_; }

    /// Training-corpus occurrence counts of admitted n-grams.
    const std::map<FeatureDescriptor, std::size_t>& counts() const { return counts_; }

    /// Content hash over config and descriptors, used to bind models and
    /// feature caches to the vocabulary they were built with.
    std::string hash() const {
        std::string canon = config_.name + (config_.unigrams ? "U" : "-") +
                            (config_.bigrams ? "B" : "-") + (config_.pos ? "P" : "-") +
                            (config_.stat ? "S" : "-") + std::to_string(config_.min_unigram_count) +
                            "/" + std::to_string(config_.min_bigram_count) + "\n";
        auto h = fnv1a64(canon);
        for (const auto& d : descriptors_) {
            h = fnv1a64(to_string(d.kind), h);
            h = fnv1a64("\t", h);
            h = fnv1a64(d.key, h);
            h = fnv1a64("\n", h);
        }
        static constexpr char hex[] = "0123456789abcdef";
        std::string out(16, '0');
        for (int i = 15; i >= 0; --i, h >>= 4)
            out[static_cast<std::size_t>(i)] = hex[h & 0xf];
        return out;
    }

private:
    FeatureConfig config_;
    std::vector<FeatureDescriptor> descriptors_;
    std::map<FeatureDescriptor, Index> index_of_;
    std::map<FeatureDescriptor, std::size_t> counts_;
    VocabularyStats stats_;
};

namespace detail {

inline std::string bigram_key(const std::string& a, const std::string& b) { return a + " " + b; }

inline std::vector<PosTag> tags_for(const Tweet& t) {
    if (t.pos_tags)
        return *t.pos_tags;
    return fallback_pos_tag(scan_tokens(t.text));
}

inline void count_ngrams(const Dataset& data, std::map<std::string, std::size_t>& unigrams,
                         std::map<std::string, std::size_t>& bigrams) {
    for (const auto& t : data) {
        const auto tokens = tokenize(t.text);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            ++unigrams[tokens[i]];
            if (i + 1 < tokens.size())
                ++bigrams[bigram_key(tokens[i], tokens[i + 1])];
        }
    }
}

} // namespace detail

/// Builds the frozen vocabulary from the training split. N-grams below the
/// pruning thresholds are dropped; when `extra_counts` is given its n-gram
/// occurrences are added to the pruning counts (joint train+test counting).
inline Vocabulary build_vocabulary(const Dataset& train, const FeatureConfig& config,
                                   const Dataset* extra_counts = nullptr) {
    if (train.empty())
        throw ValidationError("cannot build a vocabulary from an empty training set");

    std::map<std::string, std::size_t> unigrams, bigrams;
    detail::count_ngrams(train, unigrams, bigrams);
    if (extra_counts)
        detail::count_ngrams(*extra_counts, unigrams, bigrams);

    VocabularyStats stats;
    stats.unigram_candidates = unigrams.size();
    stats.bigram_candidates = bigrams.size();

    std::vector<FeatureDescriptor> descriptors;
    std::map<FeatureDescriptor, std::size_t> counts;
    if (config.unigrams) {
        for (const auto& [key, n] : unigrams) {
            if (n < config.min_unigram_count)
                continue;
            descriptors.push_back({FeatureKind::unigram, key});
            counts[descriptors.back()] = n;
            ++stats.unigram_admitted;
        }
    }
    if (config.bigrams) {
        for (const auto& [key, n] : bigrams) {
            if (n < config.min_bigram_count)
                continue;
            descriptors.push_back({FeatureKind::bigram, key});
            counts[descriptors.back()] = n;
            ++stats.bigram_admitted;
        }
    }
    if (config.stat)
        for (auto mark : kPunctuationMarks)
            descriptors.push_back({FeatureKind::punctuation, std::string(mark)});
    if (config.pos) {
        std::map<std::string, std::size_t> tags;
        for (const auto& t : train) {
            if (!t.pos_tags)
                ++stats.fallback_tagged_tweets;
            for (const auto& p : detail::tags_for(t))
                ++tags[p.tag];
        }
        for (const auto& [tag, n] : tags)
            descriptors.push_back({FeatureKind::pos_tag, tag});
        stats.pos_tags = tags.size();
    }
    if (config.stat)
        for (auto signal : kTwitterSignals)
            descriptors.push_back({FeatureKind::twitter, std::string(signal)});

    return Vocabulary(config, std::move(descriptors), std::move(counts), stats);
}

/// Twitter-specific counts computed from case-preserved tokens.
struct TwitterSignals {
    std::size_t hashtags = 0;
    std::size_t mentions = 0;
    bool retweet = false;
    std::size_t hyperlinks = 0;
};

inline TwitterSignals twitter_signals(std::string_view text) {
    TwitterSignals s;
    for (const auto& tok : scan_tokens(text)) {
        if (is_hashtag(tok))
            ++s.hashtags;
        else if (is_mention(tok))
            ++s.mentions;
        else if (is_url(tok) || is_email(tok))
            ++s.hyperlinks;
        else if (tok == "RT")
            s.retweet = true;
    }
    return s;
}

/// Maps a tweet into the vocabulary's feature space. N-gram entries are
/// presence bits; punctuation, POS and Twitter entries are counts.
inline FeatureVector featurize(const Tweet& tweet, const Vocabulary& vocab) {
    const auto& cfg = vocab.config();
    std::map<FeatureVector::Index, double> values;
    const auto tokens = tokenize(tweet.text);

    if (cfg.unigrams)
        for (const auto& t : tokens)
            if (auto i = vocab.lookup(FeatureKind::unigram, t))
                values[*i] = 1.0;
    if (cfg.bigrams)
        for (std::size_t k = 0; k + 1 < tokens.size(); ++k)
            if (auto i = vocab.lookup(FeatureKind::bigram, detail::bigram_key(tokens[k], tokens[k + 1])))
                values[*i] = 1.0;
    if (cfg.stat) {
        for (const auto& t : tokens)
            if (auto i = vocab.lookup(FeatureKind::punctuation, t))
                values[*i] += 1.0;
        const auto s = twitter_signals(tweet.text);
        const std::array<double, 4> counts{static_cast<double>(s.hashtags),
                                           static_cast<double>(s.mentions), s.retweet ? 1.0 : 0.0,
                                           static_cast<double>(s.hyperlinks)};
        for (std::size_t k = 0; k < kTwitterSignals.size(); ++k)
            if (auto i = vocab.lookup(FeatureKind::twitter, kTwitterSignals[k]))
                values[*i] += counts[k];
    }
    if (cfg.pos)
        for (const auto& p : detail::tags_for(tweet))
            if (auto i = vocab.lookup(FeatureKind::pos_tag, p.tag))
                values[*i] += 1.0;

    return FeatureVector(values);
}

inline std::vector<FeatureVector> featurize_all(const Dataset& data, const Vocabulary& vocab) {
    std::vector<FeatureVector> out;
    out.reserve(data.size());
    for (const auto& t : data)
        out.push_back(featurize(t, vocab));
    return out;
}

} // namespace tweetml
