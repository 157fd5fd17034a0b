#include <set>

#include <gtest/gtest.h>

#include "tweetml/fixtures.hpp"
#include "tweetml/knn.hpp"
#include "tweetml/linear_svm.hpp"
#include "tweetml/rakel.hpp"
#include "tweetml/synthetic.hpp"
#include "tweetml/features.hpp"

using namespace tweetml;

namespace {

struct Toy {
    std::vector<FeatureVector> x;
    std::vector<LabelVector> gold;
};

Toy toy(std::size_t n, std::uint64_t seed) {
    Toy t;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = static_cast<std::size_t>(uniform_below(rng, 3));
        const auto q = static_cast<std::size_t>(uniform_below(rng, 3));
        t.gold.push_back(LabelVector::from_pair(p, q));
        t.x.push_back(FeatureVector{{static_cast<FeatureVector::Index>(p), 1.0},
                                    {static_cast<FeatureVector::Index>(3 + q), 1.0},
                                    {static_cast<FeatureVector::Index>(6 + uniform_below(rng, 4)), 0.5}});
    }
    return t;
}

} // namespace

TEST(Binomial, Values) {
    EXPECT_EQ(binomial(6, 2), 15u);
    EXPECT_EQ(binomial(6, 3), 20u);
    EXPECT_EQ(binomial(6, 6), 1u);
    EXPECT_EQ(binomial(6, 7), 0u);
}

TEST(SampleLabelsets, DistinctSubsetsOfSizeK) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto ls = sample_labelsets(6, 2, 6, seed);
        ASSERT_EQ(ls.size(), 6u);
        std::set<Labelset> distinct(ls.begin(), ls.end());
        EXPECT_EQ(distinct.size(), 6u);
        std::set<std::size_t> covered;
        for (const auto& l : ls) {
            ASSERT_EQ(l.size(), 2u);
            EXPECT_LT(l[0], l[1]);
            covered.insert(l.begin(), l.end());
        }
        EXPECT_EQ(covered.size(), 6u);
    }
}

TEST(SampleLabelsets, ExhaustiveAndOverflow) {
    const auto all = sample_labelsets(6, 2, 15, 3);
    EXPECT_EQ(std::set<Labelset>(all.begin(), all.end()).size(), 15u);
    EXPECT_THROW(sample_labelsets(6, 2, 16, 3), ValidationError);
    EXPECT_THROW(sample_labelsets(6, 0, 1, 3), ValidationError);
    EXPECT_EQ(sample_labelsets(6, 2, 6, 42), sample_labelsets(6, 2, 6, 42));
}

TEST(SampleLabelsets, CoverageImpossibleNamesLabels) {
    try {
        sample_labelsets(6, 2, 2, 1);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("uncovered"), std::string::npos);
    }
    EXPECT_EQ(sample_labelsets(6, 2, 2, 1, false).size(), 2u);
}

TEST(EnsembleConfig, Validation) {
    EXPECT_NO_THROW((EnsembleConfig{3, 10}).validate());
    EXPECT_THROW((EnsembleConfig{2, 16}).validate(), ValidationError);
    EXPECT_THROW((EnsembleConfig{0, 1}).validate(), ValidationError);
    EXPECT_THROW((EnsembleConfig{7, 1}).validate(), ValidationError);
    EXPECT_THROW((EnsembleConfig{3, 10, 1.0}).validate(), ValidationError);
}

TEST(Voting, WorkedExample) {
    const auto members = fixtures::rakel_member_votes();
    const auto tally = tally_votes(members);
    // Hand count of each column of the vote table.
    const std::array<std::size_t, 6> sum{2, 0, 1, 1, 2, 0};
    const std::array<std::size_t, 6> votes{3, 2, 3, 2, 2, 0};
    EXPECT_EQ(tally.sum, sum);
    EXPECT_EQ(tally.votes, votes);
    EXPECT_DOUBLE_EQ(tally.average(0), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(tally.average(1), 0.0);
    EXPECT_DOUBLE_EQ(tally.average(2), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(tally.average(3), 0.5);
    EXPECT_DOUBLE_EQ(tally.average(4), 1.0);
    EXPECT_EQ(threshold_votes(tally, fixtures::kRakelEpsilon), LabelVector::parse("100|010"));
}

TEST(Voting, ThresholdIsStrict) {
    VoteTally t;
    t.add({{3, true}, {0, true}});
    t.add({{3, false}, {0, true}});
    EXPECT_FALSE(threshold_votes(t, 0.5).test(3)); // exactly 0.5
    EXPECT_TRUE(threshold_votes(t, 0.5).test(0));
    EXPECT_TRUE(threshold_votes(t, 0.49).test(3));
}

TEST(Voting, UnanimityAndUncovered) {
    VoteTally t;
    for (int i = 0; i < 4; ++i)
        t.add({{1, true}, {5, false}});
    const auto out = threshold_votes(t, 0.0);
    EXPECT_TRUE(out.test(1));
    EXPECT_FALSE(out.test(5));
    for (std::size_t j : {0u, 2u, 3u, 4u})
        EXPECT_FALSE(out.test(j)); // no votes never fires, even at epsilon 0
}

TEST(Voting, MergeEqualsJointTally) {
    const auto members = fixtures::rakel_member_votes();
    VoteTally a = tally_votes(std::span(members).first(2));
    a.merge(tally_votes(std::span(members).subspan(2)));
    EXPECT_EQ(a, tally_votes(members));
}

TEST(TrainEnsemble, ShapeAndDeterminism) {
    const auto t = toy(120, 1);
    const EnsembleConfig cfg{3, 10, 0.5, 99};
    const auto e = train_ensemble(t.x, t.gold, 10, cfg, SvmLearner{}, "abc");
    EXPECT_EQ(e.members().size(), 10u);
    EXPECT_EQ(e.vocabulary_hash(), "abc");
    for (const auto& m : e.members())
        EXPECT_EQ(m.labelset().size(), 3u);
    const auto again = train_ensemble(t.x, t.gold, 10, cfg, SvmLearner{});
    for (const auto& q : toy(30, 2).x)
        EXPECT_EQ(predict(e, q), predict(again, q));
}

TEST(TrainEnsemble, VoteBounds) {
    const auto t = toy(100, 3);
    const EnsembleConfig cfg{2, 8, 0.5, 5};
    const auto e = train_ensemble(t.x, t.gold, 10, cfg, SvmLearner{});
    for (const auto& q : toy(50, 4).x) {
        const auto tally = predict_votes(e, q);
        std::size_t total = 0;
        for (std::size_t j = 0; j < kLabelCount; ++j) {
            EXPECT_LE(tally.sum[j], tally.votes[j]);
            EXPECT_LE(tally.votes[j], cfg.m);
            total += tally.votes[j];
        }
        EXPECT_EQ(total, cfg.m * cfg.k);
    }
}

TEST(TrainEnsemble, FullLabelsetEqualsLabelPowerset) {
    const auto t = toy(90, 6);
    const EnsembleConfig cfg{6, 1, 0.5, 11};
    const auto e = train_ensemble(t.x, t.gold, 10, cfg, SvmLearner{});
    const auto lp = lp_train(t.x, t.gold, Labelset{0, 1, 2, 3, 4, 5}, SvmLearner{}, 10,
                             member_seed(cfg.seed, 0));
    for (const auto& q : toy(100, 7).x)
        EXPECT_EQ(predict(e, q), lp.predict_labels(q));
}

TEST(TrainEnsemble, MemorizesWithNearestNeighbor) {
    const auto t = toy(20, 8);
    // Distinct vectors so K = 1 can recall every training label.
    std::vector<FeatureVector> x;
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        auto entries = t.x[i].entries();
        entries.emplace_back(static_cast<FeatureVector::Index>(100 + i), 1.0);
        x.emplace_back(std::map<FeatureVector::Index, double>(entries.begin(), entries.end()));
    }
    const auto e = train_ensemble(x, t.gold, 200, EnsembleConfig{2, 15, 0.5, 1}, KnnLearner{1});
    for (std::size_t i = 0; i < x.size(); ++i)
        EXPECT_EQ(predict(e, x[i]), t.gold[i]);
}

TEST(TrainEnsemble, ErrorsNameTheLabelset) {
    const std::vector<FeatureVector> x{{{0, 1.0}}};
    const std::vector<LabelVector> gold{LabelVector::from_pair(0, 0)};
    // A single example gives constant members; KNN needs none of that, so
    // force a failure with mismatched gold instead.
    EXPECT_THROW(train_ensemble(x, std::vector<LabelVector>{}, 1, EnsembleConfig{2, 6}, KnnLearner{1}),
                 Error);
    try {
        train_ensemble(x, std::vector<LabelVector>{}, 1, EnsembleConfig{2, 6}, KnnLearner{1});
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("training labelset {"), std::string::npos) << e.what();
    }
    EXPECT_NO_THROW(train_ensemble(x, gold, 1, EnsembleConfig{2, 6}, SvmLearner{}));
}
