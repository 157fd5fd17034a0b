#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "tweetml/labels.hpp"
#include "tweetml/postprocess.hpp"
#include "tweetml/rakel.hpp"

// Worked examples with known answers, shared by the `fixtures` CLI command
// and the test suites.

namespace tweetml::fixtures {

/// Six ensemble members (k = 2) voting on one tweet. Each entry lists the
/// cells a member fills in; every other label gets no vote from it.
///
///   member  pp1 pp2 pp3 pt1 pt2
///   m1       1   -   -   0   -
///   m2       -   -   0   -   1
///   m3       -   0   -   -   1
///   m4       0   -   1   -   -
///   m5       -   -   0   1   -
///   m6       1   0   -   -   -
///
/// The cells are authoritative: m5 is listed with labelset {pt1, pt2} but
/// votes on pp3 and pt1, and the expected averages depend on exactly that.
inline std::vector<LabelsetVotes> rakel_member_votes() {
    return {
        {{0, true}, {3, false}},
        {{2, false}, {4, true}},
        {{1, false}, {4, true}},
        {{0, false}, {2, true}},
        {{2, false}, {3, true}},
        {{0, true}, {1, false}},
    };
}

inline constexpr double kRakelEpsilon = 0.5;

/// Five neighbors of a tweet whose prediction carries no labels, listed in
/// retrieval order with similarities 0.3, 0.4, 0.1, 0.2, 0.5. The two most
/// similar neighbors are express_emotion, the other three
/// social_interaction; all are pro.
inline NeighborSet repair_neighbors() {
    const auto emotion = LabelVector::from_pair(0, 0);
    const auto social = LabelVector::from_pair(2, 0);
    NeighborSet n{
        {0, 0.3, social}, {1, 0.4, emotion}, {2, 0.1, social}, {3, 0.2, social}, {4, 0.5, emotion},
    };
    std::stable_sort(n.begin(), n.end(), [](const NeighborEntry& a, const NeighborEntry& b) {
        return a.similarity > b.similarity;
    });
    return n;
}

inline LabelVector repair_prediction() { return LabelVector{}; }

} // namespace tweetml::fixtures
