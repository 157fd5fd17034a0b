#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tweetml/error.hpp"
#include "tweetml/eval.hpp"
#include "tweetml/features.hpp"
#include "tweetml/linear_svm.hpp"
#include "tweetml/rakel.hpp"

// Structured-text (JSON) archives for vocabularies, feature caches and
// models. Every archive carries a "format" tag; model and feature archives
// also carry the vocabulary hash and refuse to load against a different one.

namespace tweetml::archive {

using json = nlohmann::json;

inline constexpr std::string_view kVocabularyFormat = "tweetml-vocabulary/1";
inline constexpr std::string_view kFeaturesFormat = "tweetml-features/1";
inline constexpr std::string_view kEnsembleFormat = "tweetml-ensemble/1";
inline constexpr std::string_view kBaselinesFormat = "tweetml-baselines/1";

inline void expect_format(const json& j, std::string_view format) {
    if (!j.is_object() || !j.contains("format") || j.at("format") != format)
        throw Error("archive is not a " + std::string(format) + " document");
}

inline void expect_hash(const json& j, std::string_view vocabulary_hash) {
    const auto stored = j.at("vocabulary_hash").get<std::string>();
    if (stored != vocabulary_hash)
        throw Error("vocabulary hash mismatch: archive was built with " + stored +
                    ", current vocabulary is " + std::string(vocabulary_hash));
}

// ---- vocabulary ----------------------------------------------------------

inline json to_json(const FeatureConfig& c) {
    return {{"name", c.name},
            {"unigrams", c.unigrams},
            {"bigrams", c.bigrams},
            {"pos", c.pos},
            {"stat", c.stat},
            {"min_unigram_count", c.min_unigram_count},
            {"min_bigram_count", c.min_bigram_count}};
}

inline FeatureConfig feature_config_from_json(const json& j) {
    FeatureConfig c;
    c.name = j.at("name").get<std::string>();
    c.unigrams = j.at("unigrams").get<bool>();
    c.bigrams = j.at("bigrams").get<bool>();
    c.pos = j.at("pos").get<bool>();
    c.stat = j.at("stat").get<bool>();
    c.min_unigram_count = j.at("min_unigram_count").get<std::size_t>();
    c.min_bigram_count = j.at("min_bigram_count").get<std::size_t>();
    return c;
}

inline json to_json(const Vocabulary& v) {
    json d = json::array();
    for (const auto& desc : v.descriptors()) {
        auto it = v.counts().find(desc);
        d.push_back({to_string(desc.kind), desc.key,
                     it == v.counts().end() ? json(nullptr) : json(it->second)});
    }
    const auto& s = v.stats();
    return {{"format", kVocabularyFormat},
            {"hash", v.hash()},
            {"config", to_json(v.config())},
            {"dimension", v.dimension()},
            {"stats",
             {{"unigram_candidates", s.unigram_candidates},
              {"unigram_admitted", s.unigram_admitted},
              {"bigram_candidates", s.bigram_candidates},
              {"bigram_admitted", s.bigram_admitted},
              {"pos_tags", s.pos_tags},
              {"fallback_tagged_tweets", s.fallback_tagged_tweets}}},
            {"descriptors", std::move(d)}};
}

inline Vocabulary vocabulary_from_json(const json& j) {
    expect_format(j, kVocabularyFormat);
    std::vector<FeatureDescriptor> descriptors;
    std::map<FeatureDescriptor, std::size_t> counts;
    for (const auto& e : j.at("descriptors")) {
        FeatureDescriptor d{feature_kind_from_string(e.at(0).get<std::string>()),
                            e.at(1).get<std::string>()};
        if (!e.at(2).is_null())
            counts[d] = e.at(2).get<std::size_t>();
        descriptors.push_back(std::move(d));
    }
    VocabularyStats stats;
    const auto& s = j.at("stats");
    stats.unigram_candidates = s.at("unigram_candidates");
    stats.unigram_admitted = s.at("unigram_admitted");
    stats.bigram_candidates = s.at("bigram_candidates");
    stats.bigram_admitted = s.at("bigram_admitted");
    stats.pos_tags = s.at("pos_tags");
    stats.fallback_tagged_tweets = s.at("fallback_tagged_tweets");
    Vocabulary v(feature_config_from_json(j.at("config")), std::move(descriptors),
                 std::move(counts), stats);
    if (v.hash() != j.at("hash").get<std::string>())
        throw Error("vocabulary archive is corrupt (hash mismatch)");
    return v;
}

// ---- sparse vectors and models -------------------------------------------

inline json to_json(const FeatureVector& x) {
    json a = json::array();
    for (const auto& [i, v] : x.entries())
        a.push_back({i, v});
    return a;
}

inline FeatureVector feature_vector_from_json(const json& j) {
    std::map<FeatureVector::Index, double> m;
    for (const auto& e : j)
        m[e.at(0).get<FeatureVector::Index>()] = e.at(1).get<double>();
    return FeatureVector(m);
}

inline json to_json(const LinearSvm& svm) {
    json w = json::array();
    for (const auto& row : svm.weights()) {
        json sparse = json::array();
        for (std::size_t i = 0; i < row.size(); ++i)
            if (row[i] != 0.0)
                sparse.push_back({i, row[i]});
        w.push_back(std::move(sparse));
    }
    return {{"dimension", svm.dimension()},
            {"weights", std::move(w)},
            {"biases", svm.biases()},
            {"objective_history", svm.objective_history()}};
}

inline LinearSvm linear_svm_from_json(const json& j) {
    const auto dim = j.at("dimension").get<std::size_t>();
    std::vector<std::vector<double>> weights;
    for (const auto& row : j.at("weights")) {
        std::vector<double> w(dim, 0.0);
        for (const auto& e : row) {
            const auto i = e.at(0).get<std::size_t>();
            if (i >= dim)
                throw Error("svm archive: weight index out of range");
            w[i] = e.at(1).get<double>();
        }
        weights.push_back(std::move(w));
    }
    return LinearSvm(dim, std::move(weights), j.at("biases").get<std::vector<double>>(),
                     j.at("objective_history").get<std::vector<double>>());
}

inline json to_json(const EnsembleConfig& c) {
    return {{"k", c.k},
            {"m", c.m},
            {"epsilon", c.epsilon},
            {"seed", c.seed},
            {"coverage_check", c.coverage_check}};
}

inline EnsembleConfig ensemble_config_from_json(const json& j) {
    EnsembleConfig c;
    c.k = j.at("k");
    c.m = j.at("m");
    c.epsilon = j.at("epsilon");
    c.seed = j.at("seed");
    c.coverage_check = j.at("coverage_check");
    return c;
}

inline json to_json(const EnsembleModel<LinearSvm>& model) {
    json members = json::array();
    for (const auto& m : model.members())
        members.push_back({{"labelset", m.labelset()},
                           {"codebook", m.codebook()},
                           {"inner", m.inner() ? to_json(*m.inner()) : json(nullptr)}});
    return {{"format", kEnsembleFormat},
            {"vocabulary_hash", model.vocabulary_hash()},
            {"config", to_json(model.config())},
            {"members", std::move(members)}};
}

inline EnsembleModel<LinearSvm> ensemble_from_json(const json& j,
                                                   std::string_view vocabulary_hash) {
    expect_format(j, kEnsembleFormat);
    expect_hash(j, vocabulary_hash);
    std::vector<LpClassifier<LinearSvm>> members;
    for (const auto& m : j.at("members")) {
        std::optional<LinearSvm> inner;
        if (!m.at("inner").is_null())
            inner = linear_svm_from_json(m.at("inner"));
        members.emplace_back(m.at("labelset").get<Labelset>(),
                             m.at("codebook").get<std::vector<std::uint32_t>>(), std::move(inner));
    }
    return {ensemble_config_from_json(j.at("config")), std::move(members),
            std::string(vocabulary_hash)};
}

// ---- feature cache and baselines -----------------------------------------

inline json features_to_json(const PresetData& d) {
    auto side = [](const std::vector<std::string>& ids, const std::vector<FeatureVector>& xs,
                   const std::vector<LabelVector>& gold) {
        json a = json::array();
        for (std::size_t i = 0; i < ids.size(); ++i)
            a.push_back({{"id", ids[i]},
                         {"gold", i < gold.size() ? json(gold[i].str()) : json(nullptr)},
                         {"x", to_json(xs[i])}});
        return a;
    };
    return {{"format", kFeaturesFormat},
            {"vocabulary_hash", d.vocab.hash()},
            {"train", side(d.train_ids, d.train_x, d.train_gold)},
            {"test", side(d.test_ids, d.test_x, d.test_gold)}};
}

/// Rebuilds PresetData from a feature cache and the vocabulary it was built with.
inline PresetData features_from_json(const json& j, Vocabulary vocab) {
    expect_format(j, kFeaturesFormat);
    expect_hash(j, vocab.hash());
    PresetData d;
    d.vocab = std::move(vocab);
    auto side = [](const json& a, std::vector<std::string>& ids, std::vector<FeatureVector>& xs,
                   std::vector<LabelVector>& gold) {
        bool all_gold = true;
        for (const auto& e : a) {
            ids.push_back(e.at("id").get<std::string>());
            xs.push_back(feature_vector_from_json(e.at("x")));
            if (e.at("gold").is_null())
                all_gold = false;
            else
                gold.push_back(LabelVector::parse(e.at("gold").get<std::string>()));
        }
        if (!all_gold)
            gold.clear();
    };
    side(j.at("train"), d.train_ids, d.train_x, d.train_gold);
    side(j.at("test"), d.test_ids, d.test_x, d.test_gold);
    if (d.train_gold.size() != d.train_x.size())
        throw Error("feature cache: training examples must all be labeled");
    return d;
}

inline json baselines_to_json(const TrainedModels& m, std::string_view vocabulary_hash) {
    return {{"format", kBaselinesFormat},
            {"vocabulary_hash", vocabulary_hash},
            {"svm_purpose", m.svm_purpose ? to_json(*m.svm_purpose) : json(nullptr)},
            {"svm_position", m.svm_position ? to_json(*m.svm_position) : json(nullptr)}};
}

inline void baselines_from_json(const json& j, std::string_view vocabulary_hash,
                                TrainedModels& into) {
    expect_format(j, kBaselinesFormat);
    expect_hash(j, vocabulary_hash);
    if (!j.at("svm_purpose").is_null())
        into.svm_purpose = linear_svm_from_json(j.at("svm_purpose"));
    if (!j.at("svm_position").is_null())
        into.svm_position = linear_svm_from_json(j.at("svm_position"));
}

// ---- files ---------------------------------------------------------------

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j, int indent = -1) {
    write_text(path, j.dump(indent) + "\n");
}

} // namespace tweetml::archive
