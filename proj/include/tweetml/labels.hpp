#pragma once

#include <algorithm>
#include <array>
#include <bitset>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "tweetml/error.hpp"

namespace tweetml {

// Label layout: purpose labels occupy indices 0-2, position labels 3-5.
inline constexpr std::size_t kPurposeCount = 3;
inline constexpr std::size_t kPositionCount = 3;
inline constexpr std::size_t kLabelCount = kPurposeCount + kPositionCount;
inline constexpr std::size_t kPositionOffset = kPurposeCount;

enum class LabelGroup { purpose, position };

/// Fixed two-group label space: {express_emotion, information_sharing,
/// social_interaction} x {pro, con, neutral}.
class LabelSpace {
public:
    static constexpr std::array<std::string_view, kLabelCount> names{
        "express_emotion", "information_sharing", "social_interaction",
        "pro",             "con",                 "neutral"};

    // Short names used in tables: pp1..pp3, pt1..pt3.
    static constexpr std::array<std::string_view, kLabelCount> short_names{
        "pp1", "pp2", "pp3", "pt1", "pt2", "pt3"};

    static constexpr std::size_t size() { return kLabelCount; }

    static constexpr std::string_view name(std::size_t index) { return names.at(index); }

    static constexpr LabelGroup group_of(std::size_t index) {
        return index < kPositionOffset ? LabelGroup::purpose : LabelGroup::position;
    }

    static constexpr std::size_t group_begin(LabelGroup g) {
        return g == LabelGroup::purpose ? 0 : kPositionOffset;
    }
    static constexpr std::size_t group_end(LabelGroup g) {
        return g == LabelGroup::purpose ? kPositionOffset : kLabelCount;
    }

    /// Canonical name or documented alias (prose names from the annotation
    /// guide, case-insensitive) to label index.
    static std::optional<std::size_t> find(std::string_view label) {
        std::string key;
        key.reserve(label.size());
        for (char c : label) {
            if (c == ' ' || c == '-')
                key.push_back('_');
            else
                key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
        for (std::size_t i = 0; i < kLabelCount; ++i)
            if (key == names[i] || key == short_names[i])
                return i;
        // Prose form used by the annotation tables.
        if (key == "express_emotion/personal_interests")
            return 0;
        return std::nullopt;
    }

    /// Like find, restricted to one group.
    static std::size_t require(std::string_view label, LabelGroup group) {
        auto idx = find(label);
        if (!idx || group_of(*idx) != group)
            throw ValidationError("unknown label '" + std::string(label) + "' for " +
                                  (group == LabelGroup::purpose ? "purpose" : "position"));
        return *idx;
    }
};

/// Six-bit label vector over LabelSpace.
class LabelVector {
public:
    using Bits = std::bitset<kLabelCount>;

    constexpr LabelVector() = default;
    explicit LabelVector(Bits bits) : bits_(bits) {}

    static LabelVector from_pair(std::size_t purpose, std::size_t position) {
        if (purpose >= kPurposeCount || position >= kPositionCount)
            throw Error("label class out of range");
        LabelVector v;
        v.set(purpose);
        v.set(kPositionOffset + position);
        return v;
    }

    /// Parses the "010|100" display form (the bar is optional).
    static LabelVector parse(std::string_view text) {
        LabelVector v;
        std::size_t i = 0;
        for (char c : text) {
            if (c == '|')
                continue;
            if ((c != '0' && c != '1') || i >= kLabelCount)
                throw Error("bad label vector '" + std::string(text) + "'");
            v.set(i++, c == '1');
        }
        if (i != kLabelCount)
            throw Error("bad label vector '" + std::string(text) + "'");
        return v;
    }

    bool test(std::size_t i) const { return bits_.test(i); }
    void set(std::size_t i, bool value = true) { bits_.set(i, value); }
    const Bits& bits() const { return bits_; }
    std::size_t count() const { return bits_.count(); }

    std::size_t group_count(LabelGroup g) const {
        std::size_t n = 0;
        for (auto i = LabelSpace::group_begin(g); i < LabelSpace::group_end(g); ++i)
            n += bits_.test(i);
        return n;
    }

    /// Exactly one purpose bit and exactly one position bit.
    bool is_valid() const {
        return group_count(LabelGroup::purpose) == 1 && group_count(LabelGroup::position) == 1;
    }

    /// Index of the single set bit within a group, if exactly one.
    std::optional<std::size_t> group_class(LabelGroup g) const {
        if (group_count(g) != 1)
            return std::nullopt;
        for (auto i = LabelSpace::group_begin(g); i < LabelSpace::group_end(g); ++i)
            if (bits_.test(i))
                return i - LabelSpace::group_begin(g);
        return std::nullopt;
    }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < kLabelCount; ++i) {
            if (i == kPositionOffset)
                s.push_back('|');
            s.push_back(bits_.test(i) ? '1' : '0');
        }
        return s;
    }

    friend bool operator==(const LabelVector&, const LabelVector&) = default;

private:
    Bits bits_;
};

} // namespace tweetml
