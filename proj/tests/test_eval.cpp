#include <gtest/gtest.h>

#include "tweetml/eval.hpp"
#include "tweetml/synthetic.hpp"

using namespace tweetml;

namespace {

// Oracle: compare the printed bit strings character by character.
double hamming_by_chars(const std::vector<LabelVector>& a, const std::vector<LabelVector>& b) {
    double total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto sa = a[i].str(), sb = b[i].str();
        int diff = 0;
        for (std::size_t c = 0; c < sa.size(); ++c)
            diff += sa[c] != sb[c];
        total += diff / 6.0;
    }
    return total / static_cast<double>(a.size());
}

std::vector<FeatureConfig> presets(std::initializer_list<const char*> names) {
    std::vector<FeatureConfig> out;
    for (auto n : names)
        out.push_back(FeatureConfig::preset(n));
    return out;
}

ComparisonOptions fast_options() {
    ComparisonOptions o;
    o.svm.epochs = 5;
    o.ensemble = {3, 4};
    return o;
}

} // namespace

TEST(HammingLoss, Examples) {
    const auto a = LabelVector::parse("010|100");
    std::vector<LabelVector> t{a};
    EXPECT_EQ(hamming_loss(t, t), 0.0);
    EXPECT_DOUBLE_EQ(hamming_loss(t, std::vector{LabelVector::parse("100|100")}), 2.0 / 6.0);
    EXPECT_EQ(hamming_loss(t, std::vector{LabelVector::parse("101|011")}), 1.0);
    EXPECT_THROW(hamming_loss(t, std::vector<LabelVector>{}), Error);
    EXPECT_THROW(hamming_loss(std::vector<LabelVector>{}, std::vector<LabelVector>{}), Error);
}

TEST(HammingLoss, MatchesCharacterOracle) {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 1 + uniform_below(rng, 20);
        std::vector<LabelVector> a, b;
        for (std::uint64_t i = 0; i < n; ++i) {
            LabelVector x, y;
            for (std::size_t j = 0; j < kLabelCount; ++j) {
                x.set(j, uniform_below(rng, 2));
                y.set(j, uniform_below(rng, 2));
            }
            a.push_back(x);
            b.push_back(y);
        }
        const double loss = hamming_loss(a, b);
        EXPECT_NEAR(loss, hamming_by_chars(a, b), 1e-12);
        EXPECT_GE(loss, 0.0);
        EXPECT_LE(loss, 1.0);
        EXPECT_EQ(loss, hamming_loss(b, a));
    }
}

TEST(HammingLoss, SingleValidPairsAreQuantized) {
    // Two valid vectors differ in 0, 2 or 4 bits.
    const std::vector<double> allowed{0.0, 1.0 / 3.0, 2.0 / 3.0};
    for (std::size_t p = 0; p < 9; ++p)
        for (std::size_t q = 0; q < 9; ++q) {
            const double loss = hamming_loss(std::vector{LabelVector::from_pair(p / 3, p % 3)},
                                             std::vector{LabelVector::from_pair(q / 3, q % 3)});
            bool hit = false;
            for (double v : allowed)
                hit = hit || std::abs(loss - v) < 1e-12;
            EXPECT_TRUE(hit) << loss;
        }
}

TEST(CombineBaseline, JoinsGroups) {
    const std::vector<std::size_t> purpose{1, 0, 2}, position{0, 2, 1};
    const auto v = combine_baseline(purpose, position);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].str(), "010|100");
    for (const auto& x : v)
        EXPECT_TRUE(x.is_valid());
    EXPECT_THROW(combine_baseline(purpose, std::vector<std::size_t>{0}), Error);
}

TEST(Methods, NamesRoundTrip) {
    for (auto m : kAllMethods)
        EXPECT_EQ(method_from_string(to_string(m)), m);
    EXPECT_EQ(method_from_string("rakel_wsum"), Method::rakel_wsum);
    EXPECT_THROW(method_from_string("lda"), ValidationError);
}

TEST(RunComparison, FullGridOnSyntheticCorpus) {
    const auto data = synthetic::generate({.count = 240, .seed = 2});
    const auto [train, test] = split(data, 160, 1);
    const auto ps = presets({"f1", "f2", "f3", "f4", "f5"});
    const auto report = run_comparison(train, test, ps, kAllMethods, fast_options());
    ASSERT_EQ(report.cells.size(), 25u);
    for (const auto& c : report.cells) {
        EXPECT_EQ(c.status, "ok") << to_string(c.method) << " " << c.preset;
        ASSERT_TRUE(c.hamming_loss);
        EXPECT_GE(*c.hamming_loss, 0.0);
        EXPECT_LE(*c.hamming_loss, 1.0);
        if (c.method != Method::rakel) {
            EXPECT_EQ(c.invalid_count, 0u);
        }
    }
    const auto table = report.to_table();
    EXPECT_NE(table.find("RAkEL+wsum"), std::string::npos);
    EXPECT_NE(table.find("Loss reduction"), std::string::npos);
}

TEST(RunComparison, SingleCellAndDeterminism) {
    const auto data = synthetic::generate({.count = 150, .seed = 4});
    const auto [train, test] = split(data, 100, 1);
    const std::vector<Method> m{Method::rakel_wsum};
    const auto ps = presets({"f3"});
    const auto a = run_comparison(train, test, ps, m, fast_options());
    const auto b = run_comparison(train, test, ps, m, fast_options());
    ASSERT_EQ(a.cells.size(), 1u);
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
    EXPECT_EQ(a.cells[0].K, 10u);
}

TEST(RunComparison, RepairedCountsAgreeWithRawViolations) {
    const auto data = synthetic::generate({.count = 200, .seed = 9});
    const auto [train, test] = split(data, 130, 2);
    const auto ps = presets({"f5"});
    const std::vector<Method> m{Method::rakel, Method::rakel_sum, Method::rakel_wsum};
    const auto r = run_comparison(train, test, ps, m, fast_options());
    const auto* raw = r.find(Method::rakel, "f5");
    ASSERT_TRUE(raw);
    EXPECT_EQ(r.find(Method::rakel_sum, "f5")->repaired_count, raw->invalid_count);
    EXPECT_EQ(r.find(Method::rakel_wsum, "f5")->repaired_count, raw->invalid_count);
}

TEST(RunComparison, InvalidOptionsRejected) {
    const auto data = synthetic::generate({.count = 50, .seed = 1});
    const auto [train, test] = split(data, 30, 1);
    auto o = fast_options();
    o.ensemble = {2, 16};
    EXPECT_THROW(run_comparison(train, test, presets({"f1"}), kAllMethods, o), ValidationError);
}

TEST(SweepK, DefaultGridAndSaturation) {
    const auto data = synthetic::generate({.count = 160, .seed = 5});
    const auto [train, test] = split(data, 20, 3);
    const auto ks = default_sweep_values();
    ASSERT_EQ(ks.size(), 15u);
    EXPECT_EQ(ks.front(), 2u);
    EXPECT_EQ(ks.back(), 30u);
    const auto d = prepare_preset(train, test, FeatureConfig::preset("f5"));
    const auto e = train_preset_ensemble(d, fast_options());
    const auto points = sweep_k(d, e, RepairStrategy::sum, ks);
    ASSERT_EQ(points.size(), 15u);
    // K beyond the 20 training tweets all see the same neighbor set.
    for (const auto& p : points)
        if (p.K >= 20) {
            EXPECT_EQ(p.hamming_loss, points.back().hamming_loss);
        }
    EXPECT_THROW(sweep_k(d, e, RepairStrategy::sum, std::vector<std::size_t>{}), ValidationError);
}

TEST(SweepK, PointMatchesFullEvaluation) {
    const auto data = synthetic::generate({.count = 160, .seed = 6});
    const auto [train, test] = split(data, 100, 3);
    auto opts = fast_options();
    const auto d = prepare_preset(train, test, FeatureConfig::preset("f4"));
    const auto e = train_preset_ensemble(d, opts);
    const std::vector<std::size_t> ks{3, 7};
    const auto points = sweep_k(d, e, RepairStrategy::wsum, ks);
    for (const auto& p : points) {
        opts.post_k = p.K;
        const std::vector<Method> m{Method::rakel_wsum};
        const auto cells = run_preset(d, m, opts);
        EXPECT_DOUBLE_EQ(*cells[0].hamming_loss, p.hamming_loss);
    }
}
