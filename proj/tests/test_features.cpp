#include <map>
#include <set>

#include <gtest/gtest.h>

#include "tweetml/features.hpp"
#include "tweetml/synthetic.hpp"

using namespace tweetml;

namespace {

using Tokens = std::vector<std::string>;

Dataset corpus(const std::vector<std::string>& texts) {
    std::vector<Tweet> tweets;
    for (std::size_t i = 0; i < texts.size(); ++i)
        tweets.push_back({"t" + std::to_string(i), texts[i], std::nullopt,
                          LabelVector::from_pair(i % 3, 0)});
    return Dataset(std::move(tweets));
}

std::set<FeatureDescriptor> descriptor_set(const Vocabulary& v) {
    return {v.descriptors().begin(), v.descriptors().end()};
}

} // namespace

TEST(Tokenize, ExampleTweet) {
    EXPECT_EQ(tokenize("Should bring the death penalty back! #executed"),
              (Tokens{"should", "bring", "the", "death", "penalty", "back", "!", "#executed"}));
}

TEST(Tokenize, EmptyAndCaseFolding) {
    EXPECT_TRUE(tokenize("").empty());
    EXPECT_TRUE(tokenize("   \t ").empty());
    EXPECT_EQ(tokenize("A a A"), (Tokens{"a", "a", "a"}));
}

TEST(Tokenize, ProtectsEntities) {
    EXPECT_EQ(scan_tokens("RT @x check http://a.b and e@f.g"),
              (Tokens{"RT", "@x", "check", "http://a.b", "and", "e@f.g"}));
    EXPECT_EQ(scan_tokens("see www.x.org/a?b=1, ok?"),
              (Tokens{"see", "www.x.org/a?b=1", ",", "ok", "?"}));
    EXPECT_EQ(scan_tokens("@a:hi don't!!"), (Tokens{"@a", ":", "hi", "don't", "!", "!"}));
}

TEST(FallbackPosTag, Rules) {
    EXPECT_EQ(fallback_pos_tag({"#executed"})[0].tag, "hashtag");
    EXPECT_EQ(fallback_pos_tag({"!"})[0].tag, "punct");
    EXPECT_EQ(fallback_pos_tag({"penalty"})[0].tag, "word");
    EXPECT_EQ(fallback_pos_tag({"@bob"})[0].tag, "mention");
    EXPECT_EQ(fallback_pos_tag({"http://t.co/x"})[0].tag, "url");
    EXPECT_EQ(fallback_pos_tag({"42"})[0].tag, "number");
}

TEST(BuildVocabulary, Thresholds) {
    const auto data = corpus({"obamacare obamacare obamacare", "obamacare is obamacare",
                              "death penalty now", "death penalty again", "the death penalty",
                              "lonely"});
    const auto v = build_vocabulary(data, FeatureConfig::preset("f3"));
    EXPECT_TRUE(v.lookup(FeatureKind::unigram, "obamacare"));
    EXPECT_EQ(v.counts().at({FeatureKind::unigram, "obamacare"}), 5u);
    EXPECT_FALSE(v.lookup(FeatureKind::unigram, "lonely")); // count 1 < 2
    // "death penalty" occurs 3 times: below the bigram threshold of 4.
    EXPECT_FALSE(v.lookup(FeatureKind::bigram, "death penalty"));
    EXPECT_TRUE(v.lookup(FeatureKind::unigram, "penalty"));

    const auto four = corpus({"death penalty", "death penalty", "death penalty", "death penalty"});
    EXPECT_TRUE(build_vocabulary(four, FeatureConfig::preset("f2"))
                    .lookup(FeatureKind::bigram, "death penalty"));
}

TEST(BuildVocabulary, FixedFamilies) {
    const auto data = corpus({"a b", "a b"});
    const auto v = build_vocabulary(data, FeatureConfig::preset("f5"));
    std::size_t punct = 0, twitter = 0;
    for (const auto& d : v.descriptors()) {
        punct += d.kind == FeatureKind::punctuation;
        twitter += d.kind == FeatureKind::twitter;
    }
    EXPECT_EQ(punct, 3u);
    EXPECT_EQ(twitter, 4u);
    EXPECT_THROW(build_vocabulary(Dataset{}, FeatureConfig::preset("f1")), ValidationError);
}

TEST(BuildVocabulary, PruningHoldsOnRecount) {
    const auto data = synthetic::generate({.count = 300, .seed = 5});
    const auto v = build_vocabulary(data, FeatureConfig::preset("f5"));
    std::map<std::string, std::size_t> uni, bi;
    for (const auto& t : data) {
        const auto tok = tokenize(t.text);
        for (std::size_t i = 0; i < tok.size(); ++i) {
            ++uni[tok[i]];
            if (i + 1 < tok.size())
                ++bi[tok[i] + " " + tok[i + 1]];
        }
    }
    for (const auto& d : v.descriptors()) {
        if (d.kind == FeatureKind::unigram) {
            EXPECT_GE(uni[d.key], 2u) << d.key;
        } else if (d.kind == FeatureKind::bigram) {
            EXPECT_GE(bi[d.key], 4u) << d.key;
        }
    }
    for (const auto& [k, n] : uni)
        EXPECT_EQ(n >= 2, v.lookup(FeatureKind::unigram, k).has_value()) << k;
}

TEST(BuildVocabulary, JointCountingAdmitsMore) {
    const auto train = corpus({"rare word"});
    const auto extra = corpus({"rare thing"});
    EXPECT_FALSE(build_vocabulary(train, FeatureConfig::preset("f1")).lookup(FeatureKind::unigram, "rare"));
    EXPECT_TRUE(build_vocabulary(train, FeatureConfig::preset("f1"), &extra)
                    .lookup(FeatureKind::unigram, "rare"));
}

TEST(BuildVocabulary, PresetsNest) {
    const auto data = synthetic::generate({.count = 200, .seed = 8});
    std::map<std::string, std::set<FeatureDescriptor>> sets;
    for (auto name : {"f1", "f2", "f3", "f4", "f5"})
        sets[name] = descriptor_set(build_vocabulary(data, FeatureConfig::preset(name)));
    const auto subset = [](const auto& a, const auto& b) {
        return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
    };
    EXPECT_TRUE(subset(sets["f1"], sets["f3"]));
    EXPECT_TRUE(subset(sets["f2"], sets["f3"]));
    EXPECT_TRUE(subset(sets["f3"], sets["f4"]));
    EXPECT_TRUE(subset(sets["f4"], sets["f5"]));
    EXPECT_THROW(FeatureConfig::preset("f6"), ValidationError);
}

TEST(Featurize, ExampleTweetCounts) {
    const auto data = corpus({"Should bring the death penalty back! #executed", "the death"});
    const auto v = build_vocabulary(data, FeatureConfig::preset("f5"));
    const auto x = featurize(data[0], v);
    EXPECT_EQ(x.get(*v.lookup(FeatureKind::punctuation, "!")), 1.0);
    EXPECT_EQ(x.get(*v.lookup(FeatureKind::punctuation, "?")), 0.0);
    EXPECT_EQ(x.get(*v.lookup(FeatureKind::twitter, "hashtag_count")), 1.0);
    EXPECT_EQ(x.get(*v.lookup(FeatureKind::unigram, "the")), 1.0);
}

TEST(Featurize, TwitterSignals) {
    const auto data = corpus({"RT @x check http://a.b and e@f.g", "rt is not a retweet"});
    const auto v = build_vocabulary(data, FeatureConfig::preset("f5"));
    const auto x = featurize(data[0], v);
    EXPECT_EQ(x.get(*v.lookup(FeatureKind::twitter, "retweet_present")), 1.0);
    EXPECT_EQ(x.get(*v.lookup(FeatureKind::twitter, "mention_count")), 1.0);
    EXPECT_EQ(x.get(*v.lookup(FeatureKind::twitter, "hyperlink_count")), 2.0);
    EXPECT_EQ(featurize(data[1], v).get(*v.lookup(FeatureKind::twitter, "retweet_present")), 0.0);
}

TEST(Featurize, UnseenNgramsAbsentButStatPresent) {
    const auto data = corpus({"alpha beta", "alpha beta"});
    const auto v = build_vocabulary(data, FeatureConfig::preset("f5"));
    const auto dim = v.dimension();
    const Tweet unseen{"u", "gamma delta ?", std::nullopt, std::nullopt};
    const auto x = featurize(unseen, v);
    for (const auto& [i, val] : x.entries()) {
        EXPECT_NE(v.descriptor(i).kind, FeatureKind::unigram);
        EXPECT_NE(v.descriptor(i).kind, FeatureKind::bigram);
    }
    EXPECT_EQ(x.get(*v.lookup(FeatureKind::punctuation, "?")), 1.0);
    EXPECT_EQ(v.dimension(), dim);
}

TEST(Featurize, NgramPresenceIsBinaryAndNoZerosStored) {
    const auto data = synthetic::generate({.count = 300, .seed = 21});
    const auto v = build_vocabulary(data, FeatureConfig::preset("f5"));
    for (const auto& t : data) {
        const auto x = featurize(t, v);
        for (const auto& [i, val] : x.entries()) {
            EXPECT_NE(val, 0.0);
            const auto kind = v.descriptor(i).kind;
            if (kind == FeatureKind::unigram || kind == FeatureKind::bigram)
                EXPECT_EQ(val, 1.0);
            else
                EXPECT_EQ(val, std::floor(val));
        }
    }
    const Tweet repeated{"r", "love love love love", std::nullopt, std::nullopt};
    const auto idx = v.lookup(FeatureKind::unigram, "love");
    ASSERT_TRUE(idx);
    EXPECT_EQ(featurize(repeated, v).get(*idx), 1.0);
}

TEST(Featurize, ProvidedPosTagsTakePrecedence) {
    std::vector<Tweet> tweets{
        {"a", "hello world", std::vector<PosTag>{{"hello", "!"}, {"world", "N"}},
         LabelVector::from_pair(0, 0)},
        {"b", "hello there", std::nullopt, LabelVector::from_pair(1, 1)},
    };
    const Dataset data(std::move(tweets));
    const auto v = build_vocabulary(data, FeatureConfig::preset("f4"));
    EXPECT_TRUE(v.lookup(FeatureKind::pos_tag, "N"));
    EXPECT_TRUE(v.lookup(FeatureKind::pos_tag, "word")); // fallback for tweet b
    EXPECT_EQ(v.stats().fallback_tagged_tweets, 1u);
    const auto x = featurize(data[0], v);
    EXPECT_EQ(x.get(*v.lookup(FeatureKind::pos_tag, "N")), 1.0);
    EXPECT_EQ(x.get(*v.lookup(FeatureKind::pos_tag, "word")), 0.0);
}
