#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tweetml/error.hpp"
#include "tweetml/labels.hpp"
#include "tweetml/random.hpp"

namespace tweetml {

struct PosTag {
    std::string token;
    std::string tag;

    friend bool operator==(const PosTag&, const PosTag&) = default;
};

struct Tweet {
    std::string id;
    std::string text;
    std::optional<std::vector<PosTag>> pos_tags;
    std::optional<LabelVector> labels;

    bool labeled() const { return labels.has_value(); }

    friend bool operator==(const Tweet&, const Tweet&) = default;
};

/// Ordered tweets over the fixed LabelSpace. Ids are unique.
class Dataset {
public:
    Dataset() = default;

    explicit Dataset(std::vector<Tweet> tweets) : tweets_(std::move(tweets)) {
        std::set<std::string_view> seen;
        for (const auto& t : tweets_) {
            if (t.text.empty())
                throw ValidationError("tweet '" + t.id + "' has empty text");
            if (!seen.insert(t.id).second)
                throw ValidationError("duplicate tweet id '" + t.id + "'");
            if (t.labels && !t.labels->is_valid())
                throw ValidationError("tweet '" + t.id + "' has invalid gold labels " +
                                      t.labels->str());
        }
    }

    const std::vector<Tweet>& tweets() const { return tweets_; }
    std::size_t size() const { return tweets_.size(); }
    bool empty() const { return tweets_.empty(); }
    const Tweet& operator[](std::size_t i) const { return tweets_[i]; }

    auto begin() const { return tweets_.begin(); }
    auto end() const { return tweets_.end(); }

    bool fully_labeled() const {
        for (const auto& t : tweets_)
            if (!t.labeled())
                return false;
        return true;
    }

    /// Training operations reject unlabeled tweets.
    void require_labeled(std::string_view what) const {
        for (const auto& t : tweets_)
            if (!t.labeled())
                throw ValidationError(std::string(what) + ": tweet '" + t.id + "' is unlabeled");
    }

    std::vector<LabelVector> gold() const {
        require_labeled("gold labels");
        std::vector<LabelVector> out;
        out.reserve(tweets_.size());
        for (const auto& t : tweets_)
            out.push_back(*t.labels);
        return out;
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<Tweet> tweets_;
};

struct LoadOptions {
    // Drop tweets with fewer whitespace-separated words than this. 0 disables.
    std::size_t min_words = 0;
};

namespace detail {

inline std::size_t word_count(const std::string& text) {
    std::istringstream in(text);
    std::size_t n = 0;
    for (std::string w; in >> w;)
        ++n;
    return n;
}

} // namespace detail

/// Parses one dataset record. `line_no` is used only for error messages.
inline Tweet parse_record(const std::string& line, std::size_t line_no) {
    const auto where = "line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(where + "malformed record (" + e.what() + ")");
    }
    if (!j.is_object())
        throw Error(where + "malformed record (expected an object)");

    Tweet t;
    try {
        t.id = j.contains("id") ? j.at("id").get<std::string>() : std::to_string(line_no);
        if (!j.contains("text"))
            throw Error(where + "malformed record (missing text)");
        t.text = j.at("text").get<std::string>();
        if (t.text.empty())
            throw Error(where + "malformed record (empty text)");

        const bool has_purpose = j.contains("purpose") && !j.at("purpose").is_null();
        const bool has_position = j.contains("position") && !j.at("position").is_null();
        if (has_purpose != has_position)
            throw Error(where + "malformed record (purpose and position must both be present)");
        if (has_purpose) {
            const auto purpose = j.at("purpose").get<std::string>();
            const auto position = j.at("position").get<std::string>();
            const auto pp = LabelSpace::find(purpose);
            if (!pp || LabelSpace::group_of(*pp) != LabelGroup::purpose)
                throw Error(where + "unknown label '" + purpose + "'");
            const auto pt = LabelSpace::find(position);
            if (!pt || LabelSpace::group_of(*pt) != LabelGroup::position)
                throw Error(where + "unknown label '" + position + "'");
            t.labels = LabelVector::from_pair(*pp, *pt - kPositionOffset);
        }

        if (j.contains("pos_tags") && !j.at("pos_tags").is_null()) {
            std::vector<PosTag> tags;
            for (const auto& pair : j.at("pos_tags")) {
                if (!pair.is_array() || pair.size() != 2)
                    throw Error(where + "malformed record (pos_tags entries are [token, tag])");
                tags.push_back({pair[0].get<std::string>(), pair[1].get<std::string>()});
            }
            t.pos_tags = std::move(tags);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(where + "malformed record (" + e.what() + ")");
    }
    return t;
}

inline nlohmann::json to_record(const Tweet& t) {
    nlohmann::json j;
    j["id"] = t.id;
    j["text"] = t.text;
    if (t.labels) {
        j["purpose"] = LabelSpace::name(*t.labels->group_class(LabelGroup::purpose));
        j["position"] =
            LabelSpace::name(kPositionOffset + *t.labels->group_class(LabelGroup::position));
    }
    if (t.pos_tags) {
        auto tags = nlohmann::json::array();
        for (const auto& p : *t.pos_tags)
            tags.push_back({p.token, p.tag});
        j["pos_tags"] = std::move(tags);
    }
    return j;
}

inline Dataset read_dataset(std::istream& in, const LoadOptions& opts = {}) {
    std::vector<Tweet> tweets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto t = parse_record(line, line_no);
        if (opts.min_words > 0 && detail::word_count(t.text) < opts.min_words)
            continue;
        tweets.push_back(std::move(t));
    }
    return Dataset(std::move(tweets));
}

/// Reads a JSON-lines dataset: one {id, text, purpose, position, pos_tags}
/// record per line.
inline Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& opts = {}) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open dataset '" + path.string() + "'");
    return read_dataset(in, opts);
}

inline void write_dataset(std::ostream& out, const Dataset& data) {
    for (const auto& t : data)
        out << to_record(t).dump() << '\n';
}

inline void save_dataset(const std::filesystem::path& path, const Dataset& data) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write dataset '" + path.string() + "'");
    write_dataset(out, data);
}

/// Seeded random partition into (train, test); train has exactly train_size
/// tweets and both halves keep the original relative order.
inline std::pair<Dataset, Dataset> split(const Dataset& data, std::size_t train_size,
                                         std::uint64_t seed) {
    if (train_size > data.size())
        throw ValidationError("train_size " + std::to_string(train_size) +
                              " exceeds dataset size " + std::to_string(data.size()));
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    Rng rng(seed);
    shuffle(order, rng);

    std::vector<bool> in_train(data.size(), false);
    for (std::size_t i = 0; i < train_size; ++i)
        in_train[order[i]] = true;

    std::vector<Tweet> train, test;
    train.reserve(train_size);
    test.reserve(data.size() - train_size);
    for (std::size_t i = 0; i < data.size(); ++i)
        (in_train[i] ? train : test).push_back(data[i]);
    return {Dataset(std::move(train)), Dataset(std::move(test))};
}

} // namespace tweetml
