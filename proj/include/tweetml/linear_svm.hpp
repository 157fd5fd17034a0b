#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "tweetml/error.hpp"
#include "tweetml/random.hpp"
#include "tweetml/sparse.hpp"

namespace tweetml {

struct SvmHyper {
    double lambda = 1e-4;     // L2 regularization strength
    std::size_t epochs = 50;  // passes over the data; step size is 1 / (lambda * t)

    friend bool operator==(const SvmHyper&, const SvmHyper&) = default;
};

/// One-vs-rest linear classifier: score_c(x) = w_c . x + b_c.
class LinearSvm {
public:
    LinearSvm() = default;
    LinearSvm(std::size_t dim, std::vector<std::vector<double>> weights, std::vector<double> biases,
              std::vector<double> objective_history = {})
        : dim_(dim), weights_(std::move(weights)), biases_(std::move(biases)),
          objective_history_(std::move(objective_history)) {
        if (weights_.size() != biases_.size() || weights_.size() < 2)
            throw Error("linear svm: need matching weights and biases for at least 2 classes");
        for (const auto& w : weights_)
            if (w.size() != dim_)
                throw Error("linear svm: weight vector dimension mismatch");
    }

    std::size_t dimension() const { return dim_; }
    std::size_t class_count() const { return weights_.size(); }
    const std::vector<std::vector<double>>& weights() const { return weights_; }
    const std::vector<double>& biases() const { return biases_; }

    /// Primal objective after each epoch, summed over the one-vs-rest problems.
    const std::vector<double>& objective_history() const { return objective_history_; }

    double score(std::size_t c, const FeatureVector& x) const {
        const auto& w = weights_[c];
        double s = biases_[c];
        for (const auto& [i, v] : x.entries())
            if (i < dim_)
                s += w[i] * v;
        return s;
    }

    /// Argmax of per-class scores, ties to the lower class id.
    std::size_t predict(const FeatureVector& x) const {
        std::size_t best = 0;
        double best_score = score(0, x);
        for (std::size_t c = 1; c < weights_.size(); ++c) {
            const double s = score(c, x);
            if (s > best_score) {
                best = c;
                best_score = s;
            }
        }
        return best;
    }

    friend bool operator==(const LinearSvm&, const LinearSvm&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<std::vector<double>> weights_;
    std::vector<double> biases_;
    std::vector<double> objective_history_;
};

namespace detail {

// Pegasos state for one binary problem. The weight vector is s * v with the
// bias stored in v[dim]; sq tracks |v|^2 so scaling and projection are O(1).
struct PegasosState {
    std::vector<double> v;
    double s = 1.0;
    double sq = 0.0;

    explicit PegasosState(std::size_t dim) : v(dim + 1, 0.0) {}

    double margin_score(const FeatureVector& x, std::size_t dim) const {
        double acc = v[dim];
        for (const auto& [i, val] : x.entries())
            if (i < dim)
                acc += v[i] * val;
        return s * acc;
    }

    void renormalize() {
        for (auto& a : v)
            a *= s;
        s = 1.0;
        sq = 0.0;
        for (double a : v)
            sq += a * a;
    }
};

} // namespace detail

/// Trains a one-vs-rest hinge-loss linear model with seeded Pegasos SGD.
/// Class ids are 0..n_classes-1 and at least two must occur in `y`.
inline LinearSvm svm_train(std::span<const FeatureVector> x, std::span<const std::size_t> y,
                           std::size_t n_classes, std::size_t dim, const SvmHyper& hyper,
                           std::uint64_t seed) {
    if (x.empty())
        throw Error("svm_train: empty training data");
    if (x.size() != y.size())
        throw Error("svm_train: feature/class length mismatch");
    if (!(hyper.lambda > 0.0) || hyper.epochs == 0)
        throw ValidationError("svm_train: lambda must be > 0 and epochs >= 1");
    const std::set<std::size_t> distinct(y.begin(), y.end());
    if (distinct.size() < 2)
        throw Error("svm_train: training data has a single class; use a constant classifier");
    if (*distinct.rbegin() >= n_classes)
        throw Error("svm_train: class id out of range");

    const double lambda = hyper.lambda;
    const double radius = 1.0 / std::sqrt(lambda);
    std::vector<detail::PegasosState> states(n_classes, detail::PegasosState(dim));

    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    Rng rng(seed);

    std::vector<double> history;
    history.reserve(hyper.epochs);
    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        shuffle(order, rng);
        for (std::size_t idx : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const auto& xi = x[idx];
            for (std::size_t c = 0; c < n_classes; ++c) {
                auto& st = states[c];
                const double label = y[idx] == c ? 1.0 : -1.0;
                const double margin = label * st.margin_score(xi, dim);

                const double decay = 1.0 - eta * lambda;
                if (decay <= 0.0) {
                    std::fill(st.v.begin(), st.v.end(), 0.0);
                    st.s = 1.0;
                    st.sq = 0.0;
                } else {
                    st.s *= decay;
                }

                if (margin < 1.0) {
                    const double a = eta * label / st.s;
                    for (const auto& [i, val] : xi.entries()) {
                        if (i >= dim)
                            continue;
                        st.sq += 2.0 * a * st.v[i] * val + a * a * val * val;
                        st.v[i] += a * val;
                    }
                    st.sq += 2.0 * a * st.v[dim] + a * a;
                    st.v[dim] += a;
                }

                const double norm = st.s * std::sqrt(std::max(st.sq, 0.0));
                if (norm > radius)
                    st.s *= radius / norm;
                if (st.s < 1e-9 || st.s > 1e9)
                    st.renormalize();
            }
        }

        double objective = 0.0;
        for (std::size_t c = 0; c < n_classes; ++c) {
            auto& st = states[c];
            st.renormalize();
            double hinge = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double label = y[i] == c ? 1.0 : -1.0;
                hinge += std::max(0.0, 1.0 - label * st.margin_score(x[i], dim));
            }
            objective += 0.5 * lambda * st.sq + hinge / static_cast<double>(x.size());
        }
        history.push_back(objective);
    }

    std::vector<std::vector<double>> weights(n_classes);
    std::vector<double> biases(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto& st = states[c];
        weights[c].assign(st.v.begin(), st.v.begin() + static_cast<std::ptrdiff_t>(dim));
        biases[c] = st.v[dim];
    }
    return LinearSvm(dim, std::move(weights), std::move(biases), std::move(history));
}

/// Base learner adapter for LP / RAkEL.
struct SvmLearner {
    using model_type = LinearSvm;
    SvmHyper hyper;

    LinearSvm fit(std::span<const FeatureVector> x, std::span<const std::size_t> y,
                  std::size_t n_classes, std::size_t dim, std::uint64_t seed) const {
        return svm_train(x, y, n_classes, dim, hyper, seed);
    }
};

} // namespace tweetml
