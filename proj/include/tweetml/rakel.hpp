#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tweetml/error.hpp"
#include "tweetml/label_powerset.hpp"
#include "tweetml/labels.hpp"
#include "tweetml/random.hpp"

namespace tweetml {

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n)
        return 0;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

struct EnsembleConfig {
    std::size_t k = 3;
    std::size_t m = 10;
    double epsilon = 0.5;
    std::uint64_t seed = 0;
    bool coverage_check = true;

    void validate() const {
        if (k < 1 || k > kLabelCount)
            throw ValidationError("ensemble k must be in [1, " + std::to_string(kLabelCount) +
                                  "], got " + std::to_string(k));
        const auto max_m = binomial(kLabelCount, k);
        if (m < 1 || m > max_m)
            throw ValidationError("ensemble m must be in [1, C(" + std::to_string(kLabelCount) +
                                  "," + std::to_string(k) + ")=" + std::to_string(max_m) +
                                  "], got " + std::to_string(m));
        if (!(epsilon >= 0.0 && epsilon < 1.0))
            throw ValidationError("ensemble epsilon must be in [0, 1)");
    }

    friend bool operator==(const EnsembleConfig&, const EnsembleConfig&) = default;
};

namespace detail {

inline void enumerate_subsets(std::size_t n, std::size_t k, std::size_t start, Labelset& cur,
                              std::vector<Labelset>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i + (k - cur.size()) <= n; ++i) {
        cur.push_back(i);
        enumerate_subsets(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

/// All k-subsets of {0..n-1} in lexicographic order.
inline std::vector<Labelset> all_labelsets(std::size_t n, std::size_t k) {
    std::vector<Labelset> out;
    Labelset cur;
    detail::enumerate_subsets(n, k, 0, cur, out);
    return out;
}

inline constexpr std::size_t kCoverageAttempts = 64;

/// Draws m distinct k-subsets of {0..label_count-1} without replacement.
/// With coverage checking every label must land in some subset; draws are
/// retried with derived seeds up to kCoverageAttempts times.
inline std::vector<Labelset> sample_labelsets(std::size_t label_count, std::size_t k,
                                              std::size_t m, std::uint64_t seed,
                                              bool coverage_check = true) {
    if (k < 1 || k > label_count)
        throw ValidationError("labelset size k must be in [1, " + std::to_string(label_count) +
                              "]");
    const auto total = binomial(label_count, k);
    if (m < 1 || m > total)
        throw ValidationError("cannot draw " + std::to_string(m) + " distinct labelsets of size " +
                              std::to_string(k) + " from " + std::to_string(label_count) +
                              " labels (C=" + std::to_string(total) + ")");

    const auto pool = all_labelsets(label_count, k);
    std::vector<std::size_t> uncovered;
    for (std::size_t attempt = 0; attempt < (coverage_check ? kCoverageAttempts : 1); ++attempt) {
        Rng rng(derive_seed(seed, "labelsets/" + std::to_string(attempt)));
        std::vector<std::size_t> idx(pool.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            idx[i] = i;
        // Partial Fisher-Yates: the first m slots are a uniform draw without
        // replacement.
        for (std::size_t i = 0; i < m; ++i) {
            const auto j = i + static_cast<std::size_t>(uniform_below(rng, idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        std::vector<Labelset> chosen;
        chosen.reserve(m);
        std::vector<bool> covered(label_count, false);
        for (std::size_t i = 0; i < m; ++i) {
            chosen.push_back(pool[idx[i]]);
            for (auto l : chosen.back())
                covered[l] = true;
        }
        if (!coverage_check)
            return chosen;
        uncovered.clear();
        for (std::size_t l = 0; l < label_count; ++l)
            if (!covered[l])
                uncovered.push_back(l);
        if (uncovered.empty())
            return chosen;
        if (m * k < label_count)
            break; // no draw can cover every label
    }
    std::string names;
    for (auto l : uncovered)
        names += (names.empty() ? "" : ", ") +
                 (l < kLabelCount ? std::string(LabelSpace::name(l)) : std::to_string(l));
    throw ValidationError("labelset sampling could not cover every label; uncovered: " + names);
}

/// Per-label vote counters: sum = number of 1-votes, votes = number of
/// members that voted on the label.
struct VoteTally {
    std::array<std::size_t, kLabelCount> sum{};
    std::array<std::size_t, kLabelCount> votes{};

    void add(const LabelsetVotes& member) {
        for (const auto& v : member) {
            sum.at(v.label) += v.value ? 1 : 0;
            votes.at(v.label) += 1;
        }
    }

    void merge(const VoteTally& other) {
        for (std::size_t j = 0; j < kLabelCount; ++j) {
            sum[j] += other.sum[j];
            votes[j] += other.votes[j];
        }
    }

    /// sum/votes, or 0 for a label no member voted on.
    double average(std::size_t j) const {
        return votes[j] == 0 ? 0.0 : static_cast<double>(sum[j]) / static_cast<double>(votes[j]);
    }

    friend bool operator==(const VoteTally&, const VoteTally&) = default;
};

inline VoteTally tally_votes(std::span<const LabelsetVotes> members) {
    VoteTally t;
    for (const auto& m : members)
        t.add(m);
    return t;
}

/// Bit j is set iff votes_j > 0 and sum_j / votes_j > epsilon (strict).
inline LabelVector threshold_votes(const VoteTally& tally, double epsilon) {
    LabelVector out;
    for (std::size_t j = 0; j < kLabelCount; ++j)
        out.set(j, tally.votes[j] > 0 && tally.average(j) > epsilon);
    return out;
}

/// Trained RAkEL ensemble: m LP classifiers over distinct k-labelsets.
template <ClassModel Model>
class EnsembleModel {
public:
    EnsembleModel(EnsembleConfig config, std::vector<LpClassifier<Model>> members,
                  std::string vocabulary_hash = {})
        : config_(config), members_(std::move(members)), vocabulary_hash_(std::move(vocabulary_hash)) {
        if (members_.size() != config_.m)
            throw Error("ensemble: member count does not match m");
        for (std::size_t i = 0; i < members_.size(); ++i) {
            if (members_[i].labelset().size() != config_.k)
                throw Error("ensemble: member labelset size differs from k");
            for (std::size_t j = 0; j < i; ++j)
                if (members_[j].labelset() == members_[i].labelset())
                    throw Error("ensemble: duplicate labelset " +
                                labelset_name(members_[i].labelset()));
        }
    }

    const EnsembleConfig& config() const { return config_; }
    const std::vector<LpClassifier<Model>>& members() const { return members_; }
    const std::string& vocabulary_hash() const { return vocabulary_hash_; }

private:
    EnsembleConfig config_;
    std::vector<LpClassifier<Model>> members_;
    std::string vocabulary_hash_;
};

/// Sub-seed for member i's base learner.
inline std::uint64_t member_seed(std::uint64_t ensemble_seed, std::size_t i) {
    return derive_seed(ensemble_seed, "member/" + std::to_string(i));
}

template <BaseLearner Learner>
EnsembleModel<typename Learner::model_type>
train_ensemble(std::span<const FeatureVector> x, std::span<const LabelVector> gold, std::size_t dim,
               const EnsembleConfig& config, const Learner& learner,
               std::string vocabulary_hash = {}) {
    config.validate();
    const auto labelsets =
        sample_labelsets(kLabelCount, config.k, config.m, config.seed, config.coverage_check);
    std::vector<LpClassifier<typename Learner::model_type>> members;
    members.reserve(labelsets.size());
    for (std::size_t i = 0; i < labelsets.size(); ++i) {
        try {
            members.push_back(
                lp_train(x, gold, labelsets[i], learner, dim, member_seed(config.seed, i)));
        } catch (const std::exception& e) {
            throw Error("training labelset " + labelset_name(labelsets[i]) + ": " + e.what());
        }
    }
    return {config, std::move(members), std::move(vocabulary_hash)};
}

template <ClassModel Model>
VoteTally predict_votes(const EnsembleModel<Model>& model, const FeatureVector& x) {
    VoteTally t;
    for (const auto& member : model.members())
        t.add(member.predict(x));
    return t;
}

/// Unconstrained ensemble prediction; may violate the one-purpose +
/// one-position rule.
template <ClassModel Model>
LabelVector predict(const EnsembleModel<Model>& model, const FeatureVector& x) {
    return threshold_votes(predict_votes(model, x), model.config().epsilon);
}

} // namespace tweetml
