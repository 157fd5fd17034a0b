#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tweetml/archive.hpp"
#include "tweetml/corpus.hpp"
#include "tweetml/error.hpp"
#include "tweetml/eval.hpp"
#include "tweetml/features.hpp"
#include "tweetml/fixtures.hpp"
#include "tweetml/postprocess.hpp"
#include "tweetml/rakel.hpp"

// Stage-isolated experiment commands. Each stage reads the previous stage's
// files from the output directory:
//
//   featurize  split.json, features/<preset>.vocab.json, features/<preset>.features.json
//   train      models/<preset>.ensemble.json, models/<preset>.baselines.json, train_log.txt
//   evaluate   report.json, report.txt, audit.jsonl
//   sweep      sweep.json, sweep.csv (+ sweep.gp with plot enabled)

namespace tweetml {

struct ExperimentConfig {
    std::filesystem::path dataset;
    std::string dataset_id; // defaults to the dataset file stem
    std::filesystem::path output_dir = "tweetml-out";
    std::uint64_t seed = 42;
    std::optional<std::uint64_t> split_seed;
    std::optional<std::uint64_t> ensemble_seed;
    std::size_t train_size = 600;
    std::size_t min_words = 0;
    bool prune_jointly = false;
    std::vector<std::string> presets{"f1", "f2", "f3", "f4", "f5"};
    std::optional<std::vector<Method>> methods;
    bool baselines = true;
    EnsembleConfig ensemble;
    std::string strategy = "both"; // none | sum | wsum | both
    std::size_t post_k = 10;
    RepairScope scope = RepairScope::violated_groups_only;
    std::size_t knn_k = 10;
    SvmHyper svm;
    std::string sweep_preset = "f5";
    std::vector<std::size_t> sweep_k_values = default_sweep_values();
    bool sweep_plot = false;

    std::uint64_t resolved_split_seed() const {
        return split_seed.value_or(derive_seed(seed, "split"));
    }

    std::string resolved_dataset_id() const {
        return dataset_id.empty() ? dataset.stem().string() : dataset_id;
    }

    /// Explicit methods, or baselines (if enabled) + RAkEL + the configured
    /// post-processing strategies.
    std::vector<Method> resolved_methods() const {
        if (methods)
            return *methods;
        std::vector<Method> out;
        if (baselines) {
            out.push_back(Method::knn);
            out.push_back(Method::svm);
        }
        out.push_back(Method::rakel);
        if (strategy == "sum" || strategy == "both")
            out.push_back(Method::rakel_sum);
        if (strategy == "wsum" || strategy == "both")
            out.push_back(Method::rakel_wsum);
        return out;
    }

    std::vector<RepairStrategy> sweep_strategies() const {
        if (strategy == "sum")
            return {RepairStrategy::sum};
        if (strategy == "wsum")
            return {RepairStrategy::wsum};
        return {RepairStrategy::sum, RepairStrategy::wsum};
    }

    ComparisonOptions comparison_options() const {
        ComparisonOptions o;
        o.seed = seed;
        o.ensemble_master = ensemble_seed;
        o.ensemble = ensemble;
        o.svm = svm;
        o.knn_k = knn_k;
        o.post_k = post_k;
        o.scope = scope;
        o.prune_jointly = prune_jointly;
        return o;
    }

    /// Checks every bound before any compute starts.
    void validate(bool require_dataset = true) const {
        if (require_dataset) {
            if (dataset.empty())
                throw ValidationError("no dataset configured");
            if (!std::filesystem::is_regular_file(dataset))
                throw ValidationError("dataset '" + dataset.string() + "' does not exist");
        }
        if (output_dir.empty())
            throw ValidationError("no output directory configured");
        if (train_size < 1)
            throw ValidationError("split.train_size must be at least 1");
        if (presets.empty())
            throw ValidationError("no feature presets configured");
        std::set<std::string> seen;
        for (const auto& p : presets) {
            if (!FeatureConfig::is_preset_name(p))
                throw ValidationError("unknown feature preset '" + p + "' (expected f1..f5)");
            if (!seen.insert(p).second)
                throw ValidationError("feature preset '" + p + "' listed twice");
        }
        if (strategy != "none" && strategy != "sum" && strategy != "wsum" && strategy != "both")
            throw ValidationError("postprocess.strategy must be none, sum, wsum or both");
        if (methods && methods->empty())
            throw ValidationError("methods list is empty");
        comparison_options().validate();
        if (sweep_k_values.empty())
            throw ValidationError("sweep.k_values is empty");
        for (auto k : sweep_k_values)
            if (k < 1)
                throw ValidationError("sweep.k_values entries must be at least 1");
        if (!FeatureConfig::is_preset_name(sweep_preset))
            throw ValidationError("unknown sweep preset '" + sweep_preset + "'");
    }

    nlohmann::json to_json() const {
        nlohmann::json methods_json = nlohmann::json::array();
        for (auto m : resolved_methods())
            methods_json.push_back(to_string(m));
        nlohmann::json j{
            {"dataset", dataset.generic_string()},
            {"dataset_id", resolved_dataset_id()},
            {"output_dir", output_dir.generic_string()},
            {"seed", seed},
            {"min_words", min_words},
            {"prune_jointly", prune_jointly},
            {"split", {{"train_size", train_size}, {"seed", resolved_split_seed()}}},
            {"presets", presets},
            {"methods", methods_json},
            {"baselines", baselines},
            {"ensemble",
             {{"k", ensemble.k},
              {"m", ensemble.m},
              {"epsilon", ensemble.epsilon},
              {"coverage_check", ensemble.coverage_check}}},
            {"postprocess",
             {{"strategy", strategy}, {"K", post_k}, {"scope", to_string(scope)}}},
            {"knn_k", knn_k},
            {"svm", {{"lambda", svm.lambda}, {"epochs", svm.epochs}}},
            {"sweep", {{"preset", sweep_preset}, {"k_values", sweep_k_values}, {"plot", sweep_plot}}},
        };
        if (ensemble_seed)
            j["ensemble"]["seed"] = *ensemble_seed;
        return j;
    }

    /// Reads a config document. Unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json& j) {
        ExperimentConfig c;
        c.merge_json(j);
        return c;
    }

    void merge_json(const nlohmann::json& j) {
        using nlohmann::json;
        if (!j.is_object())
            throw ValidationError("config must be a JSON object");
        const auto check_keys = [](const json& obj, std::initializer_list<std::string_view> keys,
                                   std::string_view where) {
            if (!obj.is_object())
                throw ValidationError("config '" + std::string(where) + "' must be an object");
            for (const auto& [k, v] : obj.items()) {
                bool ok = false;
                for (auto key : keys)
                    ok = ok || k == key;
                if (!ok)
                    throw ValidationError("unknown config key '" + std::string(where) +
                                          (where.empty() ? "" : ".") + k + "'");
            }
        };
        try {
            check_keys(j,
                       {"dataset", "dataset_id", "output_dir", "seed", "min_words", "prune_jointly",
                        "split", "presets", "methods", "baselines", "ensemble", "postprocess",
                        "knn_k", "svm", "sweep"},
                       "");
            if (j.contains("dataset")) dataset = j["dataset"].get<std::string>();
            if (j.contains("dataset_id")) dataset_id = j["dataset_id"].get<std::string>();
            if (j.contains("output_dir")) output_dir = j["output_dir"].get<std::string>();
            if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
            if (j.contains("min_words")) min_words = j["min_words"].get<std::size_t>();
            if (j.contains("prune_jointly")) prune_jointly = j["prune_jointly"].get<bool>();
            if (j.contains("split")) {
                const auto& s = j["split"];
                check_keys(s, {"train_size", "seed"}, "split");
                if (s.contains("train_size")) train_size = s["train_size"].get<std::size_t>();
                if (s.contains("seed")) split_seed = s["seed"].get<std::uint64_t>();
            }
            if (j.contains("presets")) presets = j["presets"].get<std::vector<std::string>>();
            if (j.contains("methods")) {
                std::vector<Method> ms;
                for (const auto& m : j["methods"])
                    ms.push_back(method_from_string(m.get<std::string>()));
                methods = std::move(ms);
            }
            if (j.contains("baselines")) baselines = j["baselines"].get<bool>();
            if (j.contains("ensemble")) {
                const auto& e = j["ensemble"];
                check_keys(e, {"k", "m", "epsilon", "seed", "coverage_check"}, "ensemble");
                if (e.contains("k")) ensemble.k = e["k"].get<std::size_t>();
                if (e.contains("m")) ensemble.m = e["m"].get<std::size_t>();
                if (e.contains("epsilon")) ensemble.epsilon = e["epsilon"].get<double>();
                if (e.contains("seed")) ensemble_seed = e["seed"].get<std::uint64_t>();
                if (e.contains("coverage_check"))
                    ensemble.coverage_check = e["coverage_check"].get<bool>();
            }
            if (j.contains("postprocess")) {
                const auto& p = j["postprocess"];
                check_keys(p, {"strategy", "K", "scope"}, "postprocess");
                if (p.contains("strategy")) strategy = p["strategy"].get<std::string>();
                if (p.contains("K")) post_k = p["K"].get<std::size_t>();
                if (p.contains("scope"))
                    scope = repair_scope_from_string(p["scope"].get<std::string>());
            }
            if (j.contains("knn_k")) knn_k = j["knn_k"].get<std::size_t>();
            if (j.contains("svm")) {
                const auto& s = j["svm"];
                check_keys(s, {"lambda", "epochs"}, "svm");
                if (s.contains("lambda")) svm.lambda = s["lambda"].get<double>();
                if (s.contains("epochs")) svm.epochs = s["epochs"].get<std::size_t>();
            }
            if (j.contains("sweep")) {
                const auto& s = j["sweep"];
                check_keys(s, {"preset", "k_values", "plot"}, "sweep");
                if (s.contains("preset")) sweep_preset = s["preset"].get<std::string>();
                if (s.contains("k_values"))
                    sweep_k_values = s["k_values"].get<std::vector<std::size_t>>();
                if (s.contains("plot")) sweep_plot = s["plot"].get<bool>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("bad config value: ") + e.what());
        }
    }

    static ExperimentConfig load(const std::filesystem::path& path) {
        return from_json(archive::read_json(path));
    }
};

namespace paths {
inline std::filesystem::path split(const ExperimentConfig& c) { return c.output_dir / "split.json"; }
inline std::filesystem::path vocab(const ExperimentConfig& c, const std::string& p) {
    return c.output_dir / "features" / (p + ".vocab.json");
}
inline std::filesystem::path features(const ExperimentConfig& c, const std::string& p) {
    return c.output_dir / "features" / (p + ".features.json");
}
inline std::filesystem::path ensemble(const ExperimentConfig& c, const std::string& p) {
    return c.output_dir / "models" / (p + ".ensemble.json");
}
inline std::filesystem::path baselines(const ExperimentConfig& c, const std::string& p) {
    return c.output_dir / "models" / (p + ".baselines.json");
}
} // namespace paths

/// Loads the dataset, splits it, and writes vocabulary + feature cache per preset.
inline void cmd_featurize(const ExperimentConfig& config, std::ostream& log) {
    config.validate();
    const auto data = load_dataset(config.dataset, LoadOptions{config.min_words});
    data.require_labeled("featurize");
    const auto [train, test] = split(data, config.train_size, config.resolved_split_seed());

    nlohmann::json split_doc{{"seed", config.resolved_split_seed()},
                             {"train", nlohmann::json::array()},
                             {"test", nlohmann::json::array()}};
    for (const auto& t : train)
        split_doc["train"].push_back(t.id);
    for (const auto& t : test)
        split_doc["test"].push_back(t.id);
    archive::write_json(paths::split(config), split_doc);

    log << "dataset " << config.dataset.string() << ": " << data.size() << " tweets, train "
        << train.size() << ", test " << test.size() << "\n";
    for (const auto& name : config.presets) {
        const auto data_p =
            prepare_preset(train, test, FeatureConfig::preset(name), config.prune_jointly);
        archive::write_json(paths::vocab(config, name), archive::to_json(data_p.vocab), 1);
        archive::write_json(paths::features(config, name), archive::features_to_json(data_p));
        const auto& s = data_p.vocab.stats();
        log << name << ": dimension " << data_p.vocab.dimension() << "  unigrams "
            << s.unigram_admitted << "/" << s.unigram_candidates << "  bigrams "
            << s.bigram_admitted << "/" << s.bigram_candidates << "  pos tags " << s.pos_tags;
        if (data_p.vocab.config().pos && s.fallback_tagged_tweets > 0)
            log << " (" << s.fallback_tagged_tweets
                << " tweets tagged by the approximate fallback tagger)";
        log << "\n";
    }
}

inline PresetData load_preset_data(const ExperimentConfig& config, const std::string& preset) {
    const auto vpath = paths::vocab(config, preset);
    const auto fpath = paths::features(config, preset);
    if (!std::filesystem::exists(vpath) || !std::filesystem::exists(fpath))
        throw ValidationError("feature cache for preset " + preset + " is missing under '" +
                              config.output_dir.string() + "'; run featurize first");
    auto vocab = archive::vocabulary_from_json(archive::read_json(vpath));
    if (vocab.config() != FeatureConfig::preset(preset))
        throw Error("feature cache for preset " + preset + " was built with a different config");
    return archive::features_from_json(archive::read_json(fpath), std::move(vocab));
}

/// Trains the ensemble (and SVM baselines) for every preset and saves them.
inline void cmd_train(const ExperimentConfig& config, std::ostream& log) {
    config.validate(false);
    const auto methods = config.resolved_methods();
    const auto opts = config.comparison_options();
    std::ostringstream train_log;
    for (const auto& preset : config.presets) {
        const auto data = load_preset_data(config, preset);
        const auto models = train_models(data, methods, opts);
        if (!models.failures.empty())
            throw Error("preset " + preset + ": " + models.failures.front().second);
        train_log << "preset " << preset << " (vocabulary " << data.vocab.hash() << ", "
                  << data.train_x.size() << " training tweets)\n";
        if (models.ensemble) {
            const auto& e = *models.ensemble;
            archive::write_json(paths::ensemble(config, preset), archive::to_json(e));
            train_log << "  ensemble k=" << e.config().k << " m=" << e.config().m
                      << " epsilon=" << e.config().epsilon << " seed=" << e.config().seed << "\n";
            for (std::size_t i = 0; i < e.members().size(); ++i) {
                const auto& m = e.members()[i];
                train_log << "    member " << i + 1 << " labelset " << labelset_name(m.labelset())
                          << " seed=" << member_seed(e.config().seed, i) << " meta-classes="
                          << m.class_count() << (m.is_constant() ? " (constant)" : "") << "\n";
            }
        }
        if (models.svm_purpose) {
            archive::write_json(paths::baselines(config, preset),
                                archive::baselines_to_json(models, data.vocab.hash()));
            train_log << "  svm baselines seeds purpose="
                      << svm_seed(opts.seed, LabelGroup::purpose, preset)
                      << " position=" << svm_seed(opts.seed, LabelGroup::position, preset) << "\n";
        }
    }
    archive::write_text(config.output_dir / "train_log.txt", train_log.str());
    log << train_log.str();
}

inline TrainedModels load_models(const ExperimentConfig& config, const PresetData& data,
                                 const std::vector<Method>& methods) {
    TrainedModels models;
    const auto& preset = data.preset();
    if (std::any_of(methods.begin(), methods.end(), uses_ensemble)) {
        const auto path = paths::ensemble(config, preset);
        if (!std::filesystem::exists(path))
            throw ValidationError("no trained ensemble for preset " + preset + " ('" +
                                  path.string() + "'); run train first");
        models.ensemble = archive::ensemble_from_json(archive::read_json(path), data.vocab.hash());
    }
    if (wants(methods, Method::svm)) {
        const auto path = paths::baselines(config, preset);
        if (!std::filesystem::exists(path))
            throw ValidationError("no trained SVM baselines for preset " + preset +
                                  "; run train first");
        archive::baselines_from_json(archive::read_json(path), data.vocab.hash(), models);
    }
    return models;
}

/// Scores every configured method x preset and writes the report files.
inline EvalReport cmd_evaluate(const ExperimentConfig& config, std::ostream& log) {
    config.validate(false);
    const auto methods = config.resolved_methods();
    const auto opts = config.comparison_options();

    EvalReport report;
    report.dataset_id = config.resolved_dataset_id();
    report.config = config.to_json();
    std::string audit_lines;
    const AuditSink sink = [&](const AuditEntry& e) { audit_lines += e.to_json().dump() + "\n"; };
    std::size_t fallback_tagged = 0;
    for (const auto& preset : config.presets) {
        const auto data = load_preset_data(config, preset);
        if (data.vocab.config().pos)
            fallback_tagged = std::max(fallback_tagged, data.vocab.stats().fallback_tagged_tweets);
        const auto models = load_models(config, data, methods);
        for (auto& c : evaluate_models(data, models, methods, opts, sink))
            report.cells.push_back(std::move(c));
    }
    report.config["pos_tagging"] =
        fallback_tagged > 0
            ? "approximate: " + std::to_string(fallback_tagged) +
                  " training tweets tagged by the rule-based fallback tagger"
            : std::string("precomputed tags");

    archive::write_json(config.output_dir / "report.json", report.to_json(), 2);
    const auto table = report.to_table();
    archive::write_text(config.output_dir / "report.txt", table);
    archive::write_text(config.output_dir / "audit.jsonl", audit_lines);
    log << table;
    return report;
}

struct SweepSeries {
    RepairStrategy strategy;
    std::vector<SweepPoint> points;

    double spread() const {
        if (points.empty())
            return 0.0;
        auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                            [](const SweepPoint& a, const SweepPoint& b) {
                                                return a.hamming_loss < b.hamming_loss;
                                            });
        return hi->hamming_loss - lo->hamming_loss;
    }
};

/// K-sensitivity sweep over the trained ensemble of the sweep preset.
inline std::vector<SweepSeries> cmd_sweep(const ExperimentConfig& config, std::ostream& log) {
    config.validate(false);
    const auto data = load_preset_data(config, config.sweep_preset);
    const auto models = load_models(config, data, {Method::rakel});

    std::vector<SweepSeries> series;
    nlohmann::json doc{{"dataset", config.resolved_dataset_id()},
                       {"preset", config.sweep_preset},
                       {"scope", to_string(config.scope)},
                       {"series", nlohmann::json::array()}};
    std::string csv = "strategy,K,hamming_loss,repaired_count\n";
    char buf[96];
    for (auto strategy : config.sweep_strategies()) {
        SweepSeries s{strategy,
                      sweep_k(data, *models.ensemble, strategy, config.sweep_k_values, config.scope)};
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : s.points) {
            pts.push_back({{"K", p.K}, {"hamming_loss", p.hamming_loss},
                           {"repaired_count", p.repaired_count}});
            std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%zu\n",
                          std::string(to_string(strategy)).c_str(), p.K, p.hamming_loss,
                          p.repaired_count);
            csv += buf;
        }
        doc["series"].push_back(
            {{"strategy", to_string(strategy)}, {"points", pts}, {"spread", s.spread()}});
        log << "RAkEL+" << to_string(strategy) << ": " << s.points.size()
            << " points, loss spread " << s.spread() << "\n";
        series.push_back(std::move(s));
    }
    archive::write_json(config.output_dir / "sweep.json", doc, 2);
    archive::write_text(config.output_dir / "sweep.csv", csv);
    if (config.sweep_plot) {
        std::string gp = "set datafile separator ','\nset key autotitle columnhead\n"
                         "set xlabel 'K'\nset ylabel 'Hamming loss'\nset terminal pngcairo\n"
                         "set output 'sweep.png'\nplot ";
        bool first = true;
        for (const auto& s : series) {
            const std::string name(to_string(s.strategy));
            gp += std::string(first ? "" : ", ") + "'< grep ^" + name +
                  ", sweep.csv' using 2:3 with linespoints title 'RAkEL+" + name + "'";
            first = false;
        }
        archive::write_text(config.output_dir / "sweep.gp", gp + "\n");
    }
    return series;
}

/// Runs the worked voting and repair examples and prints one line per check.
inline bool cmd_fixtures(std::ostream& log) {
    bool all = true;
    const auto check = [&](bool ok, const std::string& what) {
        log << (ok ? "PASS " : "FAIL ") << what << "\n";
        all = all && ok;
    };

    const auto votes = fixtures::rakel_member_votes();
    const auto tally = tally_votes(votes);
    const std::array<std::pair<std::size_t, std::size_t>, 5> expected{
        {{2, 3}, {0, 2}, {1, 3}, {1, 2}, {2, 2}}};
    for (std::size_t j = 0; j < expected.size(); ++j) {
        const auto [num, den] = expected[j];
        check(tally.sum[j] * den == num * tally.votes[j] && tally.votes[j] == den,
              "average vote " + std::string(LabelSpace::short_names[j]) + " = " +
                  std::to_string(tally.sum[j]) + "/" + std::to_string(tally.votes[j]));
    }
    const auto final_pred = threshold_votes(tally, fixtures::kRakelEpsilon);
    check(final_pred == LabelVector::parse("100|010"),
          "thresholded prediction at epsilon 0.5 = " + final_pred.str() + " (pt1 at 1/2 excluded)");

    const auto neighbors = fixtures::repair_neighbors();
    const auto pred = fixtures::repair_prediction();
    const auto s = sum_scores(neighbors);
    const auto w = wsum_scores(neighbors);
    const auto by_sum = repair_sum(neighbors, pred, needs_repair(pred));
    const auto by_wsum = repair_wsum(neighbors, pred, needs_repair(pred));
    check(by_sum.group_class(LabelGroup::purpose) == 2u && s[2] == 3.0,
          "summation picks the third purpose label with score " + std::to_string(s[2]));
    check(by_wsum.group_class(LabelGroup::purpose) == 0u && std::abs(w[0] - 0.9) < 1e-12,
          "weighted summation picks the first purpose label with score " + std::to_string(w[0]));
    check(by_sum.is_valid() && by_wsum.is_valid(), "repaired predictions are valid");
    return all;
}

} // namespace tweetml
