#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tweetml/error.hpp"
#include "tweetml/labels.hpp"
#include "tweetml/sparse.hpp"

namespace tweetml {

/// Sorted, duplicate-free subset of label indices.
using Labelset = std::vector<std::size_t>;

inline std::string labelset_name(const Labelset& ls) {
    std::string s = "{";
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (i)
            s += ",";
        s += LabelSpace::short_names.at(ls[i]);
    }
    return s + "}";
}

inline void check_labelset(const Labelset& ls) {
    if (ls.empty() || ls.size() > kLabelCount)
        throw Error("labelset size must be in [1, " + std::to_string(kLabelCount) + "]");
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (ls[i] >= kLabelCount)
            throw Error("labelset index out of range");
        if (i && ls[i] <= ls[i - 1])
            throw Error("labelset must be strictly increasing");
    }
}

struct LabelVote {
    std::size_t label;
    bool value;

    friend bool operator==(const LabelVote&, const LabelVote&) = default;
};

/// One 0/1 vote per label of a member's labelset; labels outside it get none.
using LabelsetVotes = std::vector<LabelVote>;

template <class M>
concept ClassModel = requires(const M& m, const FeatureVector& x) {
    { m.predict(x) } -> std::convertible_to<std::size_t>;
};

template <class L>
concept BaseLearner = requires(const L& l, std::span<const FeatureVector> x,
                               std::span<const std::size_t> y, std::size_t n, std::uint64_t seed) {
    typename L::model_type;
    requires ClassModel<typename L::model_type>;
    { l.fit(x, y, n, n, seed) } -> std::same_as<typename L::model_type>;
};

/// Label powerset classifier bound to one labelset. Each distinct projection
/// of the training labels onto the labelset is a meta-class; the codebook
/// maps meta-class ids to projection masks (bit p <-> labelset[p]), sorted by
/// mask value.
template <ClassModel Model>
class LpClassifier {
public:
    using Mask = std::uint32_t;

    LpClassifier(Labelset labelset, std::vector<Mask> codebook, std::optional<Model> inner)
        : labelset_(std::move(labelset)), codebook_(std::move(codebook)), inner_(std::move(inner)) {
        check_labelset(labelset_);
        if (codebook_.empty())
            throw Error("lp: empty codebook");
        const Mask limit = Mask{1} << labelset_.size();
        for (std::size_t i = 0; i < codebook_.size(); ++i) {
            if (codebook_[i] >= limit)
                throw Error("lp: codebook pattern outside labelset");
            if (i && codebook_[i] <= codebook_[i - 1])
                throw Error("lp: codebook must be strictly increasing");
        }
        if (!inner_ && codebook_.size() != 1)
            throw Error("lp: constant classifier needs exactly one meta-class");
    }

    const Labelset& labelset() const { return labelset_; }
    const std::vector<Mask>& codebook() const { return codebook_; }
    const std::optional<Model>& inner() const { return inner_; }
    bool is_constant() const { return !inner_.has_value(); }
    std::size_t class_count() const { return codebook_.size(); }

    Mask project(const LabelVector& labels) const {
        Mask m = 0;
        for (std::size_t p = 0; p < labelset_.size(); ++p)
            if (labels.test(labelset_[p]))
                m |= Mask{1} << p;
        return m;
    }

    std::optional<std::size_t> encode(Mask pattern) const {
        auto it = std::lower_bound(codebook_.begin(), codebook_.end(), pattern);
        if (it == codebook_.end() || *it != pattern)
            return std::nullopt;
        return static_cast<std::size_t>(it - codebook_.begin());
    }

    Mask decode(std::size_t meta_class) const { return codebook_.at(meta_class); }

    std::size_t predict_class(const FeatureVector& x) const {
        return inner_ ? static_cast<std::size_t>(inner_->predict(x)) : 0;
    }

    /// The decoded pattern as a LabelVector (labels outside the labelset 0).
    LabelVector predict_labels(const FeatureVector& x) const {
        const Mask m = decode(predict_class(x));
        LabelVector v;
        for (std::size_t p = 0; p < labelset_.size(); ++p)
            v.set(labelset_[p], (m >> p) & 1U);
        return v;
    }

    LabelsetVotes predict(const FeatureVector& x) const {
        const Mask m = decode(predict_class(x));
        LabelsetVotes votes;
        votes.reserve(labelset_.size());
        for (std::size_t p = 0; p < labelset_.size(); ++p)
            votes.push_back({labelset_[p], ((m >> p) & 1U) != 0});
        return votes;
    }

private:
    Labelset labelset_;
    std::vector<Mask> codebook_;
    std::optional<Model> inner_;
};

/// Trains an LP classifier on `labelset`. A labelset whose projections are
/// all identical yields a constant classifier.
template <BaseLearner Learner>
LpClassifier<typename Learner::model_type> lp_train(std::span<const FeatureVector> x,
                                                    std::span<const LabelVector> gold,
                                                    const Labelset& labelset,
                                                    const Learner& learner, std::size_t dim,
                                                    std::uint64_t seed) {
    using Lp = LpClassifier<typename Learner::model_type>;
    check_labelset(labelset);
    if (x.empty() || x.size() != gold.size())
        throw Error("lp_train: need one gold label vector per training vector");

    std::vector<typename Lp::Mask> patterns;
    patterns.reserve(gold.size());
    for (const auto& g : gold) {
        typename Lp::Mask m = 0;
        for (std::size_t p = 0; p < labelset.size(); ++p)
            if (g.test(labelset[p]))
                m |= typename Lp::Mask{1} << p;
        patterns.push_back(m);
    }
    std::vector<typename Lp::Mask> codebook(patterns);
    std::sort(codebook.begin(), codebook.end());
    codebook.erase(std::unique(codebook.begin(), codebook.end()), codebook.end());

    if (codebook.size() == 1)
        return Lp(labelset, std::move(codebook), std::nullopt);

    std::vector<std::size_t> classes;
    classes.reserve(patterns.size());
    for (auto m : patterns)
        classes.push_back(static_cast<std::size_t>(
            std::lower_bound(codebook.begin(), codebook.end(), m) - codebook.begin()));
    auto inner = learner.fit(x, classes, codebook.size(), dim, seed);
    return Lp(labelset, std::move(codebook), std::move(inner));
}

} // namespace tweetml
