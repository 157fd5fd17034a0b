#include <gtest/gtest.h>

#include "tweetml/archive.hpp"
#include "tweetml/synthetic.hpp"

using namespace tweetml;

namespace {

struct Fixture {
    PresetData data;
    EnsembleModel<LinearSvm> ensemble;
};

Fixture make(const char* preset = "f5") {
    const auto corpus = synthetic::generate({.count = 120, .seed = 13});
    const auto [train, test] = split(corpus, 80, 1);
    auto data = prepare_preset(train, test, FeatureConfig::preset(preset));
    ComparisonOptions opts;
    opts.svm.epochs = 4;
    opts.ensemble = {3, 5};
    auto e = train_preset_ensemble(data, opts);
    return {std::move(data), std::move(e)};
}

} // namespace

TEST(Archive, VocabularyRoundTrip) {
    const auto f = make();
    const auto j = archive::to_json(f.data.vocab);
    const auto back = archive::vocabulary_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.hash(), f.data.vocab.hash());
    EXPECT_EQ(back.descriptors(), f.data.vocab.descriptors());
    EXPECT_EQ(back.dimension(), f.data.vocab.dimension());
}

TEST(Archive, CorruptVocabularyDetected) {
    auto j = archive::to_json(make("f1").data.vocab);
    j["descriptors"].erase(0);
    EXPECT_THROW(archive::vocabulary_from_json(j), Error);
    j["format"] = "something-else/1";
    EXPECT_THROW(archive::vocabulary_from_json(j), Error);
}

TEST(Archive, EnsembleRoundTripPredictsIdentically) {
    const auto f = make();
    const auto text = archive::to_json(f.ensemble).dump();
    const auto back = archive::ensemble_from_json(nlohmann::json::parse(text), f.data.vocab.hash());
    EXPECT_EQ(back.config(), f.ensemble.config());
    ASSERT_EQ(back.members().size(), f.ensemble.members().size());
    for (const auto& x : f.data.test_x)
        EXPECT_EQ(predict(back, x), predict(f.ensemble, x));
    EXPECT_EQ(archive::to_json(back).dump(), text);
}

TEST(Archive, RefusesMismatchedVocabulary) {
    const auto f = make();
    const auto j = archive::to_json(f.ensemble);
    try {
        archive::ensemble_from_json(j, "0000000000000000");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("vocabulary hash mismatch"), std::string::npos);
    }
}

TEST(Archive, FeatureCacheRoundTrip) {
    const auto f = make();
    const auto back = archive::features_from_json(
        nlohmann::json::parse(archive::features_to_json(f.data).dump()), f.data.vocab);
    EXPECT_EQ(back.train_x, f.data.train_x);
    EXPECT_EQ(back.test_x, f.data.test_x);
    EXPECT_EQ(back.train_gold, f.data.train_gold);
    EXPECT_EQ(back.test_ids, f.data.test_ids);
}

TEST(Archive, SvmRoundTripIsExact) {
    const auto f = make("f2");
    const auto svm = svm_train(f.data.train_x, group_classes(f.data.train_gold, LabelGroup::purpose),
                               3, f.data.vocab.dimension(), {1e-4, 3}, 1);
    const auto back = archive::linear_svm_from_json(nlohmann::json::parse(archive::to_json(svm).dump()));
    EXPECT_EQ(back, svm);
}
