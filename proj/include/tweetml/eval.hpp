#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tweetml/corpus.hpp"
#include "tweetml/error.hpp"
#include "tweetml/features.hpp"
#include "tweetml/knn.hpp"
#include "tweetml/labels.hpp"
#include "tweetml/linear_svm.hpp"
#include "tweetml/postprocess.hpp"
#include "tweetml/rakel.hpp"

namespace tweetml {

/// Mean over instances of |truth XOR pred| / |L|.
inline double hamming_loss(std::span<const LabelVector> truth, std::span<const LabelVector> pred) {
    if (truth.size() != pred.size())
        throw Error("hamming_loss: truth has " + std::to_string(truth.size()) +
                    " instances, prediction has " + std::to_string(pred.size()));
    if (truth.empty())
        throw Error("hamming_loss: no instances");
    double total = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        total += static_cast<double>((truth[i].bits() ^ pred[i].bits()).count()) /
                 static_cast<double>(kLabelCount);
    return total / static_cast<double>(truth.size());
}

/// Joins per-group single-label predictions into (always valid) label vectors.
inline std::vector<LabelVector> combine_baseline(std::span<const std::size_t> purpose,
                                                 std::span<const std::size_t> position) {
    if (purpose.size() != position.size())
        throw Error("combine_baseline: " + std::to_string(purpose.size()) +
                    " purpose predictions vs " + std::to_string(position.size()) +
                    " position predictions");
    std::vector<LabelVector> out;
    out.reserve(purpose.size());
    for (std::size_t i = 0; i < purpose.size(); ++i)
        out.push_back(LabelVector::from_pair(purpose[i], position[i]));
    return out;
}

enum class Method { knn, svm, rakel, rakel_sum, rakel_wsum };

inline constexpr std::array<Method, 5> kAllMethods{Method::knn, Method::svm, Method::rakel,
                                                   Method::rakel_sum, Method::rakel_wsum};

inline std::string_view to_string(Method m) {
    switch (m) {
    case Method::knn: return "KNN";
    case Method::svm: return "SVM";
    case Method::rakel: return "RAkEL";
    case Method::rakel_sum: return "RAkEL+sum";
    case Method::rakel_wsum: return "RAkEL+wsum";
    }
    return "?";
}

inline Method method_from_string(std::string_view s) {
    std::string key;
    for (char c : s)
        key.push_back(c == '_' ? '+' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (key == "knn") return Method::knn;
    if (key == "svm") return Method::svm;
    if (key == "rakel") return Method::rakel;
    if (key == "rakel+sum") return Method::rakel_sum;
    if (key == "rakel+wsum") return Method::rakel_wsum;
    throw ValidationError("unknown method '" + std::string(s) +
                          "' (knn|svm|rakel|rakel+sum|rakel+wsum)");
}

inline bool uses_ensemble(Method m) {
    return m == Method::rakel || m == Method::rakel_sum || m == Method::rakel_wsum;
}

struct ComparisonOptions {
    std::uint64_t seed = 42;
    // Optional separate master for ensemble seeds; defaults to `seed`.
    std::optional<std::uint64_t> ensemble_master;
    EnsembleConfig ensemble;  // ensemble.seed is overwritten per preset
    SvmHyper svm;
    std::size_t knn_k = 10;
    std::size_t post_k = 10;
    RepairScope scope = RepairScope::violated_groups_only;
    bool prune_jointly = false; // count n-grams over train + test when pruning

    void validate() const {
        EnsembleConfig e = ensemble;
        e.validate();
        if (knn_k < 1)
            throw ValidationError("knn K must be at least 1");
        if (post_k < 1)
            throw ValidationError("postprocess K must be at least 1");
        if (!(svm.lambda > 0.0) || svm.epochs < 1)
            throw ValidationError("svm lambda must be > 0 and epochs >= 1");
    }
};

// Seed derivation, all from the master seed:
//   ensemble (labelset sampling + member SVMs)  derive_seed(seed, "ensemble/<preset>")
//   purpose / position SVM baselines            derive_seed(seed, "svm/<group>/<preset>")
//   train/test split (CLI)                      derive_seed(seed, "split")
inline std::uint64_t ensemble_seed(std::uint64_t master, std::string_view preset) {
    return derive_seed(master, "ensemble/" + std::string(preset));
}
inline std::uint64_t svm_seed(std::uint64_t master, LabelGroup g, std::string_view preset) {
    return derive_seed(master, std::string("svm/") +
                                   (g == LabelGroup::purpose ? "purpose/" : "position/") +
                                   std::string(preset));
}

/// One preset's featurized train/test split.
struct PresetData {
    Vocabulary vocab;
    std::vector<std::string> train_ids, test_ids;
    std::vector<FeatureVector> train_x, test_x;
    std::vector<LabelVector> train_gold, test_gold;

    const std::string& preset() const { return vocab.config().name; }
};

inline PresetData prepare_preset(const Dataset& train, const Dataset& test,
                                 const FeatureConfig& preset, bool prune_jointly = false) {
    train.require_labeled("training set");
    PresetData d;
    d.vocab = build_vocabulary(train, preset, prune_jointly ? &test : nullptr);
    d.train_x = featurize_all(train, d.vocab);
    d.test_x = featurize_all(test, d.vocab);
    d.train_gold = train.gold();
    if (test.fully_labeled())
        d.test_gold = test.gold();
    for (const auto& t : train)
        d.train_ids.push_back(t.id);
    for (const auto& t : test)
        d.test_ids.push_back(t.id);
    return d;
}

inline std::vector<std::size_t> group_classes(std::span<const LabelVector> gold, LabelGroup g) {
    std::vector<std::size_t> out;
    out.reserve(gold.size());
    for (const auto& v : gold) {
        auto c = v.group_class(g);
        if (!c)
            throw Error("gold label vector " + v.str() + " is not valid");
        out.push_back(*c);
    }
    return out;
}

struct TrainedModels {
    std::optional<EnsembleModel<LinearSvm>> ensemble;
    std::optional<LinearSvm> svm_purpose, svm_position;
    // Per-method training failures, reported as failed cells.
    std::vector<std::pair<Method, std::string>> failures;
};

inline bool wants(std::span<const Method> methods, Method m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

inline EnsembleModel<LinearSvm> train_preset_ensemble(const PresetData& data,
                                                      const ComparisonOptions& opts) {
    EnsembleConfig cfg = opts.ensemble;
    cfg.seed = ensemble_seed(opts.ensemble_master.value_or(opts.seed), data.preset());
    return train_ensemble(data.train_x, data.train_gold, data.vocab.dimension(), cfg,
                          SvmLearner{opts.svm}, data.vocab.hash());
}

inline TrainedModels train_models(const PresetData& data, std::span<const Method> methods,
                                  const ComparisonOptions& opts) {
    TrainedModels models;
    const bool need_ensemble = std::any_of(methods.begin(), methods.end(), uses_ensemble);
    if (need_ensemble) {
        try {
            models.ensemble = train_preset_ensemble(data, opts);
        } catch (const std::exception& e) {
            for (auto m : methods)
                if (uses_ensemble(m))
                    models.failures.emplace_back(m, e.what());
        }
    }
    if (wants(methods, Method::svm)) {
        try {
            const auto dim = data.vocab.dimension();
            models.svm_purpose =
                svm_train(data.train_x, group_classes(data.train_gold, LabelGroup::purpose),
                          kPurposeCount, dim, opts.svm,
                          svm_seed(opts.seed, LabelGroup::purpose, data.preset()));
            models.svm_position =
                svm_train(data.train_x, group_classes(data.train_gold, LabelGroup::position),
                          kPositionCount, dim, opts.svm,
                          svm_seed(opts.seed, LabelGroup::position, data.preset()));
        } catch (const std::exception& e) {
            models.failures.emplace_back(Method::svm, e.what());
        }
    }
    return models;
}

struct ReportCell {
    Method method = Method::knn;
    std::string preset;
    std::optional<double> hamming_loss;
    std::size_t repaired_count = 0;
    std::size_t invalid_count = 0; // final predictions violating the constraint
    std::optional<std::size_t> K;
    std::uint64_t seed = 0;
    std::string status = "ok";

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["method"] = to_string(method);
        j["preset"] = preset;
        j["hamming_loss"] = hamming_loss ? nlohmann::json(*hamming_loss) : nlohmann::json(nullptr);
        j["repaired_count"] = repaired_count;
        j["invalid_count"] = invalid_count;
        j["K"] = K ? nlohmann::json(*K) : nlohmann::json(nullptr);
        j["seed"] = seed;
        j["status"] = status;
        return j;
    }
};

/// Per-tweet repair audit entry.
struct AuditEntry {
    std::string preset;
    RepairStrategy strategy;
    std::string tweet_id;
    RepairOutcome outcome;
    std::vector<std::string> neighbor_ids;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["preset"] = preset;
        j["strategy"] = to_string(strategy);
        j["tweet"] = tweet_id;
        auto groups = nlohmann::json::array();
        if (outcome.repaired.purpose)
            groups.push_back("purpose");
        if (outcome.repaired.position)
            groups.push_back("position");
        j["groups"] = groups;
        j["before"] = outcome.before.str();
        j["after"] = outcome.after.str();
        j["neighbors"] = neighbor_ids;
        j["scores"] = outcome.scores;
        return j;
    }
};

using AuditSink = std::function<void(const AuditEntry&)>;

inline std::size_t count_invalid(std::span<const LabelVector> preds) {
    return static_cast<std::size_t>(
        std::count_if(preds.begin(), preds.end(), [](const LabelVector& v) { return !v.is_valid(); }));
}

/// Predicts, repairs and scores every requested method on the test split.
inline std::vector<ReportCell> evaluate_models(const PresetData& data, const TrainedModels& models,
                                               std::span<const Method> methods,
                                               const ComparisonOptions& opts,
                                               const AuditSink& audit = {}) {
    std::vector<ReportCell> cells;
    const auto& preset = data.preset();
    if (data.test_gold.size() != data.test_x.size())
        throw ValidationError("test set for preset " + preset + " is not fully labeled");

    std::optional<std::vector<LabelVector>> raw;
    if (models.ensemble) {
        raw.emplace();
        for (const auto& x : data.test_x)
            raw->push_back(predict(*models.ensemble, x));
    }
    std::optional<TrainingIndex> index;

    for (auto method : methods) {
        ReportCell cell;
        cell.method = method;
        cell.preset = preset;
        cell.seed = method == Method::svm ? svm_seed(opts.seed, LabelGroup::purpose, preset)
                    : uses_ensemble(method) ? ensemble_seed(opts.ensemble_master.value_or(opts.seed), preset)
                                            : opts.seed;
        auto failed = std::find_if(models.failures.begin(), models.failures.end(),
                                   [&](const auto& f) { return f.first == method; });
        if (failed != models.failures.end()) {
            cell.status = "failed: " + failed->second;
            cells.push_back(std::move(cell));
            continue;
        }
        try {
            std::vector<LabelVector> preds;
            switch (method) {
            case Method::knn: {
                cell.K = opts.knn_k;
                KnnClassifier pp(data.train_x, group_classes(data.train_gold, LabelGroup::purpose),
                                 opts.knn_k);
                KnnClassifier pt(data.train_x, group_classes(data.train_gold, LabelGroup::position),
                                 opts.knn_k);
                std::vector<std::size_t> a, b;
                for (const auto& x : data.test_x) {
                    a.push_back(pp.predict(x));
                    b.push_back(pt.predict(x));
                }
                preds = combine_baseline(a, b);
                break;
            }
            case Method::svm: {
                if (!models.svm_purpose || !models.svm_position)
                    throw Error("SVM baseline was not trained");
                std::vector<std::size_t> a, b;
                for (const auto& x : data.test_x) {
                    a.push_back(models.svm_purpose->predict(x));
                    b.push_back(models.svm_position->predict(x));
                }
                preds = combine_baseline(a, b);
                break;
            }
            case Method::rakel:
                if (!raw)
                    throw Error("ensemble was not trained");
                preds = *raw;
                break;
            case Method::rakel_sum:
            case Method::rakel_wsum: {
                if (!raw)
                    throw Error("ensemble was not trained");
                if (!index)
                    index.emplace(data.train_x, data.train_gold);
                const PostprocessConfig post{method == Method::rakel_sum ? RepairStrategy::sum
                                                                         : RepairStrategy::wsum,
                                             opts.post_k, opts.scope};
                cell.K = opts.post_k;
                for (std::size_t i = 0; i < raw->size(); ++i) {
                    auto outcome = repair((*raw)[i], data.test_x[i], *index, post);
                    if (outcome.changed()) {
                        ++cell.repaired_count;
                        if (audit) {
                            AuditEntry entry{preset, post.strategy, data.test_ids[i], outcome, {}};
                            for (auto n : outcome.neighbor_indices)
                                entry.neighbor_ids.push_back(data.train_ids[n]);
                            audit(entry);
                        }
                    }
                    preds.push_back(outcome.after);
                }
                break;
            }
            }
            cell.invalid_count = count_invalid(preds);
            cell.hamming_loss = hamming_loss(data.test_gold, preds);
        } catch (const std::exception& e) {
            cell.status = std::string("failed: ") + e.what();
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

struct EvalReport {
    std::string dataset_id;
    nlohmann::json config = nlohmann::json::object();
    std::vector<ReportCell> cells;

    const ReportCell* find(Method m, std::string_view preset) const {
        for (const auto& c : cells)
            if (c.method == m && c.preset == preset)
                return &c;
        return nullptr;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["dataset"] = dataset_id;
        j["config"] = config;
        auto arr = nlohmann::json::array();
        for (const auto& c : cells)
            arr.push_back(c.to_json());
        j["cells"] = std::move(arr);
        return j;
    }

    /// Methods x presets grid of Hamming losses, then absolute and relative
    /// loss reductions of the post-processed variants against each baseline.
    std::string to_table() const {
        std::vector<std::string> presets;
        std::vector<Method> methods;
        for (const auto& c : cells) {
            if (std::find(presets.begin(), presets.end(), c.preset) == presets.end())
                presets.push_back(c.preset);
            if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
                methods.push_back(c.method);
        }
        std::ostringstream out;
        char buf[64];
        out << "Hamming loss (" << dataset_id << ")\n";
        std::snprintf(buf, sizeof buf, "%-12s", "method");
        out << buf;
        for (const auto& p : presets) {
            std::snprintf(buf, sizeof buf, " %8s", p.c_str());
            out << buf;
        }
        out << "   repaired\n";
        for (auto m : methods) {
            std::snprintf(buf, sizeof buf, "%-12s", std::string(to_string(m)).c_str());
            out << buf;
            std::size_t repaired = 0;
            for (const auto& p : presets) {
                const auto* c = find(m, p);
                if (c && c->hamming_loss)
                    std::snprintf(buf, sizeof buf, " %8.4f", *c->hamming_loss);
                else
                    std::snprintf(buf, sizeof buf, " %8s", c ? "FAILED" : "-");
                out << buf;
                if (c)
                    repaired += c->repaired_count;
            }
            out << "   " << repaired << "\n";
        }

        bool header = false;
        for (auto target : {Method::rakel_sum, Method::rakel_wsum}) {
            for (auto base : {Method::knn, Method::svm, Method::rakel}) {
                for (const auto& p : presets) {
                    const auto* t = find(target, p);
                    const auto* b = find(base, p);
                    if (!t || !b || !t->hamming_loss || !b->hamming_loss)
                        continue;
                    if (!header) {
                        out << "\nLoss reduction (absolute = base - method, relative = absolute / base)\n";
                        header = true;
                    }
                    const double abs = *b->hamming_loss - *t->hamming_loss;
                    const double rel = *b->hamming_loss > 0 ? abs / *b->hamming_loss : 0.0;
                    std::snprintf(buf, sizeof buf, "%-10s vs %-6s", std::string(to_string(target)).c_str(),
                                  std::string(to_string(base)).c_str());
                    out << buf;
                    std::snprintf(buf, sizeof buf, " %s: %+.4f (%+.2f%%)\n", p.c_str(), abs, 100.0 * rel);
                    out << buf;
                }
            }
        }
        return out.str();
    }
};

inline std::vector<ReportCell> run_preset(const PresetData& data, std::span<const Method> methods,
                                          const ComparisonOptions& opts,
                                          const AuditSink& audit = {}) {
    const auto models = train_models(data, methods, opts);
    return evaluate_models(data, models, methods, opts, audit);
}

/// Trains, predicts, repairs and scores every (method, preset) cell.
inline EvalReport run_comparison(const Dataset& train, const Dataset& test,
                                 std::span<const FeatureConfig> presets,
                                 std::span<const Method> methods, const ComparisonOptions& opts,
                                 const AuditSink& audit = {}) {
    opts.validate();
    train.require_labeled("training set");
    test.require_labeled("test set");
    EvalReport report;
    for (const auto& preset : presets) {
        try {
            const auto data = prepare_preset(train, test, preset, opts.prune_jointly);
            for (auto& c : run_preset(data, methods, opts, audit))
                report.cells.push_back(std::move(c));
        } catch (const std::exception& e) {
            for (auto m : methods) {
                ReportCell cell;
                cell.method = m;
                cell.preset = preset.name;
                cell.status = std::string("failed: ") + e.what();
                report.cells.push_back(std::move(cell));
            }
        }
    }
    return report;
}

struct SweepPoint {
    std::size_t K;
    double hamming_loss;
    std::size_t repaired_count;
};

/// Hamming loss of ensemble + repair for each K. The ensemble is trained
/// once; only the post-processing neighborhood changes between points.
inline std::vector<SweepPoint> sweep_k(const PresetData& data,
                                       const EnsembleModel<LinearSvm>& ensemble,
                                       RepairStrategy strategy, std::span<const std::size_t> k_values,
                                       RepairScope scope = RepairScope::violated_groups_only) {
    if (k_values.empty())
        throw ValidationError("sweep_k: no K values");
    if (strategy == RepairStrategy::none)
        throw ValidationError("sweep_k: strategy must be sum or wsum");
    for (auto k : k_values)
        if (k < 1)
            throw ValidationError("sweep_k: K must be at least 1");
    if (data.test_gold.size() != data.test_x.size())
        throw ValidationError("sweep_k: test set is not fully labeled");

    const TrainingIndex index(data.train_x, data.train_gold);
    const auto max_k = *std::max_element(k_values.begin(), k_values.end());
    std::vector<LabelVector> raw;
    std::vector<std::optional<NeighborSet>> neighbors(data.test_x.size());
    for (std::size_t i = 0; i < data.test_x.size(); ++i) {
        raw.push_back(predict(ensemble, data.test_x[i]));
        // Neighbor order is total (similarity, then index), so the top-K list
        // is a prefix of the top-max_k list.
        if (needs_repair(raw.back()).any())
            neighbors[i] = find_neighbors(data.test_x[i], index, max_k);
    }

    std::vector<SweepPoint> points;
    for (auto k : k_values) {
        std::vector<LabelVector> preds;
        std::size_t repaired = 0;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            auto flags = needs_repair(raw[i]);
            if (!flags.any()) {
                preds.push_back(raw[i]);
                continue;
            }
            if (scope == RepairScope::full_relabel)
                flags = {true, true};
            NeighborSet top(neighbors[i]->begin(),
                            neighbors[i]->begin() +
                                static_cast<std::ptrdiff_t>(std::min(k, neighbors[i]->size())));
            preds.push_back(strategy == RepairStrategy::sum ? repair_sum(top, raw[i], flags)
                                                            : repair_wsum(top, raw[i], flags));
            ++repaired;
        }
        points.push_back({k, hamming_loss(data.test_gold, preds), repaired});
    }
    return points;
}

inline std::vector<SweepPoint> sweep_k(const Dataset& train, const Dataset& test,
                                       const FeatureConfig& preset, RepairStrategy strategy,
                                       std::span<const std::size_t> k_values,
                                       const ComparisonOptions& opts) {
    if (k_values.empty())
        throw ValidationError("sweep_k: no K values");
    opts.validate();
    const auto data = prepare_preset(train, test, preset, opts.prune_jointly);
    const auto ensemble = train_preset_ensemble(data, opts);
    return sweep_k(data, ensemble, strategy, k_values, opts.scope);
}

/// K = 2, 4, ..., 30.
inline std::vector<std::size_t> default_sweep_values() {
    std::vector<std::size_t> ks;
    for (std::size_t k = 2; k <= 30; k += 2)
        ks.push_back(k);
    return ks;
}

} // namespace tweetml
