#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <utility>
#include <vector>

namespace tweetml {

/// Sparse feature vector: entries sorted by index, no stored zeros.
class FeatureVector {
public:
    using Index = std::uint32_t;
    using Entry = std::pair<Index, double>;

    FeatureVector() = default;

    FeatureVector(std::initializer_list<Entry> entries) {
        std::map<Index, double> m;
        for (const auto& [i, v] : entries)
            m[i] += v;
        assign(m);
    }

    explicit FeatureVector(const std::map<Index, double>& m) { assign(m); }

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t nnz() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    double get(Index i) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                                   [](const Entry& e, Index key) { return e.first < key; });
        return it != entries_.end() && it->first == i ? it->second : 0.0;
    }

    double squared_norm() const {
        double s = 0.0;
        for (const auto& [i, v] : entries_)
            s += v * v;
        return s;
    }
    double norm() const { return std::sqrt(squared_norm()); }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
    void assign(const std::map<Index, double>& m) {
        entries_.reserve(m.size());
        for (const auto& [i, v] : m)
            if (v != 0.0)
                entries_.emplace_back(i, v);
    }

    std::vector<Entry> entries_;
};

inline double dot(const FeatureVector& a, const FeatureVector& b) {
    const auto& x = a.entries();
    const auto& y = b.entries();
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i].first < y[j].first)
            ++i;
        else if (y[j].first < x[i].first)
            ++j;
        else
            s += x[i++].second * y[j++].second;
    }
    return s;
}

/// dot(a, b) / (|a| |b|), or 0 when either vector has zero norm.
inline double cosine_similarity(const FeatureVector& a, const FeatureVector& b) {
    const double sa = a.squared_norm();
    const double sb = b.squared_norm();
    if (sa == 0.0 || sb == 0.0)
        return 0.0;
    // sqrt(sa * sb) keeps sim(a, a) == 1 exactly.
    return dot(a, b) / std::sqrt(sa * sb);
}

} // namespace tweetml
