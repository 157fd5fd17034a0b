#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tweetml/error.hpp"
#include "tweetml/sparse.hpp"

namespace tweetml {

struct Neighbor {
    std::size_t index;
    double similarity;
};

/// Top-k training vectors by cosine similarity, ordered by descending
/// similarity with ties broken by lower index. k is clamped to the pool size.
inline std::vector<Neighbor> nearest_neighbors(const FeatureVector& query,
                                               std::span<const FeatureVector> pool,
                                               std::size_t k) {
    std::vector<Neighbor> all;
    all.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
        all.push_back({i, cosine_similarity(query, pool[i])});
    const auto take = std::min(k, all.size());
    const auto before = [](const Neighbor& a, const Neighbor& b) {
        if (a.similarity != b.similarity)
            return a.similarity > b.similarity;
        return a.index < b.index;
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                      before);
    all.resize(take);
    return all;
}

/// Cosine-similarity KNN over sparse vectors.
class KnnClassifier {
public:
    KnnClassifier(std::vector<FeatureVector> vectors, std::vector<std::size_t> classes,
                  std::size_t k)
        : vectors_(std::move(vectors)), classes_(std::move(classes)), k_(k) {
        if (vectors_.empty() || vectors_.size() != classes_.size())
            throw Error("knn: need one class per training vector and at least one vector");
        if (k_ == 0)
            throw Error("knn: K must be at least 1");
        n_classes_ = *std::max_element(classes_.begin(), classes_.end()) + 1;
    }

    std::size_t k() const { return k_; }
    std::size_t size() const { return vectors_.size(); }

    /// Majority class among the K most similar training vectors; ties go to
    /// the larger summed similarity, then the lower class id.
    std::size_t predict(const FeatureVector& query) const {
        std::vector<std::size_t> votes(n_classes_, 0);
        std::vector<double> weight(n_classes_, 0.0);
        for (const auto& n : nearest_neighbors(query, vectors_, k_)) {
            ++votes[classes_[n.index]];
            weight[classes_[n.index]] += n.similarity;
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < n_classes_; ++c)
            if (votes[c] > votes[best] || (votes[c] == votes[best] && weight[c] > weight[best]))
                best = c;
        return best;
    }

private:
    std::vector<FeatureVector> vectors_;
    std::vector<std::size_t> classes_;
    std::size_t k_;
    std::size_t n_classes_ = 0;
};

/// Base learner producing KnnClassifier models. With k = 1 it memorizes its
/// training set.
struct KnnLearner {
    using model_type = KnnClassifier;
    std::size_t k = 1;

    KnnClassifier fit(std::span<const FeatureVector> x, std::span<const std::size_t> y,
                      std::size_t /*n_classes*/, std::size_t /*dim*/,
                      std::uint64_t /*seed*/) const {
        return KnnClassifier({x.begin(), x.end()}, {y.begin(), y.end()}, k);
    }
};

} // namespace tweetml
