#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tweetml/corpus.hpp"
#include "tweetml/error.hpp"
#include "tweetml/features.hpp"
#include "tweetml/knn.hpp"
#include "tweetml/labels.hpp"
#include "tweetml/sparse.hpp"

namespace tweetml {

enum class RepairStrategy { none, sum, wsum };
enum class RepairScope { violated_groups_only, full_relabel };

inline std::string_view to_string(RepairStrategy s) {
    switch (s) {
    case RepairStrategy::none: return "none";
    case RepairStrategy::sum: return "sum";
    case RepairStrategy::wsum: return "wsum";
    }
    return "?";
}

inline std::string_view to_string(RepairScope s) {
    return s == RepairScope::full_relabel ? "full_relabel" : "violated_groups_only";
}

inline RepairStrategy repair_strategy_from_string(std::string_view s) {
    if (s == "none") return RepairStrategy::none;
    if (s == "sum") return RepairStrategy::sum;
    if (s == "wsum") return RepairStrategy::wsum;
    throw ValidationError("unknown repair strategy '" + std::string(s) + "' (none|sum|wsum)");
}

inline RepairScope repair_scope_from_string(std::string_view s) {
    if (s == "violated_groups_only") return RepairScope::violated_groups_only;
    if (s == "full_relabel") return RepairScope::full_relabel;
    throw ValidationError("unknown repair scope '" + std::string(s) +
                          "' (violated_groups_only|full_relabel)");
}

struct PostprocessConfig {
    RepairStrategy strategy = RepairStrategy::wsum;
    std::size_t K = 10;
    RepairScope scope = RepairScope::violated_groups_only;

    void validate() const {
        if (K < 1)
            throw ValidationError("postprocess K must be at least 1");
    }

    friend bool operator==(const PostprocessConfig&, const PostprocessConfig&) = default;
};

struct RepairFlags {
    bool purpose = false;
    bool position = false;

    bool any() const { return purpose || position; }
    bool has(LabelGroup g) const { return g == LabelGroup::purpose ? purpose : position; }

    friend bool operator==(const RepairFlags&, const RepairFlags&) = default;
};

/// A group is invalid when it does not hold exactly one bit.
inline RepairFlags needs_repair(const LabelVector& pred) {
    return {pred.group_count(LabelGroup::purpose) != 1,
            pred.group_count(LabelGroup::position) != 1};
}

struct NeighborEntry {
    std::size_t index;
    double similarity;
    LabelVector gold;
};

/// Neighbors ordered by descending similarity (ties: lower training index).
using NeighborSet = std::vector<NeighborEntry>;

/// Featurized, labeled training set searched during repair.
class TrainingIndex {
public:
    TrainingIndex(std::vector<FeatureVector> vectors, std::vector<LabelVector> gold)
        : vectors_(std::move(vectors)), gold_(std::move(gold)) {
        if (vectors_.size() != gold_.size())
            throw Error("training index: vectors and labels differ in length");
    }

    TrainingIndex(const Dataset& train, const Vocabulary& vocab)
        : TrainingIndex(featurize_all(train, vocab), train.gold()) {}

    std::size_t size() const { return vectors_.size(); }
    bool empty() const { return vectors_.empty(); }
    const std::vector<FeatureVector>& vectors() const { return vectors_; }
    const std::vector<LabelVector>& gold() const { return gold_; }

private:
    std::vector<FeatureVector> vectors_;
    std::vector<LabelVector> gold_;
};

inline NeighborSet find_neighbors(const FeatureVector& query, const TrainingIndex& train,
                                  std::size_t K) {
    if (train.empty())
        throw Error("find_neighbors: empty training set");
    NeighborSet out;
    for (const auto& n : nearest_neighbors(query, train.vectors(), K))
        out.push_back({n.index, n.similarity, train.gold()[n.index]});
    return out;
}

inline NeighborSet find_neighbors(const FeatureVector& query, const Dataset& train,
                                  const Vocabulary& vocab, std::size_t K) {
    if (train.empty())
        throw Error("find_neighbors: empty training set");
    return find_neighbors(query, TrainingIndex(train, vocab), K);
}

using LabelScores = std::array<double, kLabelCount>;

/// Count of neighbors whose gold vector sets each label.
inline LabelScores sum_scores(const NeighborSet& neighbors) {
    LabelScores s{};
    for (const auto& n : neighbors)
        for (std::size_t j = 0; j < kLabelCount; ++j)
            s[j] += n.gold.test(j) ? 1.0 : 0.0;
    return s;
}

/// Similarity-weighted label counts. When every similarity is zero the
/// weights carry no information and plain counts are used instead.
inline LabelScores wsum_scores(const NeighborSet& neighbors) {
    bool any_weight = false;
    for (const auto& n : neighbors)
        any_weight = any_weight || n.similarity != 0.0;
    if (!any_weight)
        return sum_scores(neighbors);
    LabelScores s{};
    for (const auto& n : neighbors)
        for (std::size_t j = 0; j < kLabelCount; ++j)
            if (n.gold.test(j))
                s[j] += n.similarity;
    return s;
}

/// Replaces each flagged group with its argmax label (ties: lower index);
/// unflagged groups are kept as predicted.
inline LabelVector apply_scores(const LabelScores& scores, const LabelVector& pred,
                                RepairFlags flags) {
    LabelVector out = pred;
    for (auto g : {LabelGroup::purpose, LabelGroup::position}) {
        if (!flags.has(g))
            continue;
        const auto b = LabelSpace::group_begin(g);
        const auto e = LabelSpace::group_end(g);
        std::size_t best = b;
        for (auto j = b + 1; j < e; ++j)
            if (scores[j] > scores[best])
                best = j;
        for (auto j = b; j < e; ++j)
            out.set(j, j == best);
    }
    return out;
}

inline LabelVector repair_sum(const NeighborSet& neighbors, const LabelVector& pred,
                              RepairFlags flags) {
    return apply_scores(sum_scores(neighbors), pred, flags);
}

inline LabelVector repair_wsum(const NeighborSet& neighbors, const LabelVector& pred,
                               RepairFlags flags) {
    return apply_scores(wsum_scores(neighbors), pred, flags);
}

/// Audit record for one repaired prediction.
struct RepairOutcome {
    LabelVector before;
    LabelVector after;
    RepairFlags repaired;
    LabelScores scores{};
    std::vector<std::size_t> neighbor_indices;

    bool changed() const { return repaired.any(); }
};

/// Repairs `pred` if it violates the one-purpose + one-position rule.
/// Valid predictions pass through untouched. With full_relabel scope both
/// groups of an invalid prediction are re-derived from the neighbors.
inline RepairOutcome repair(const LabelVector& pred, const FeatureVector& query,
                            const TrainingIndex& train, const PostprocessConfig& config) {
    RepairOutcome out{pred, pred, {}, {}, {}};
    if (config.strategy == RepairStrategy::none)
        return out;
    auto flags = needs_repair(pred);
    if (!flags.any())
        return out;
    if (config.scope == RepairScope::full_relabel)
        flags = {true, true};

    const auto neighbors = find_neighbors(query, train, config.K);
    out.scores = config.strategy == RepairStrategy::sum ? sum_scores(neighbors)
                                                        : wsum_scores(neighbors);
    out.after = apply_scores(out.scores, pred, flags);
    out.repaired = flags;
    for (const auto& n : neighbors)
        out.neighbor_indices.push_back(n.index);
    return out;
}

} // namespace tweetml
