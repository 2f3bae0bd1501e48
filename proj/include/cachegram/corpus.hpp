// Copyright (c) 2026 The cachegram authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cachegram/errors.hpp"

namespace cachegram {

inline bool is_token_separator(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

/// Splits on runs of ASCII whitespace. No case folding, no punctuation
/// handling; the expected input is pre-normalized flat text (text8 style).
/// Returned views point into `text`.
inline std::vector<std::string_view> tokenize(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_token_separator(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_token_separator(text[i])) ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }
    return tokens;
}

struct VocabEntry {
    std::string word;
    std::int64_t count = 0;
};

namespace detail {
struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
};
}  // namespace detail

/// Frequency-filtered word list. Ids are 0..V-1 in non-increasing count
/// order (ties broken by earliest first occurrence in the stream), so id
/// doubles as the frequency rank.
class Vocabulary {
public:
    static constexpr std::int32_t kNotFound = -1;

    Vocabulary() = default;
    Vocabulary(std::vector<VocabEntry> entries, std::int64_t total)
        : entries_(std::move(entries)), total_tokens_(total) {
        index_.reserve(entries_.size());
        for (std::size_t i = 0; i < entries_.size(); ++i)
            index_.emplace(entries_[i].word, static_cast<std::int32_t>(i));
    }

    std::int32_t size() const { return static_cast<std::int32_t>(entries_.size()); }
    std::int64_t total_tokens() const { return total_tokens_; }

    const VocabEntry& entry(std::int32_t id) const { return entries_[static_cast<std::size_t>(id)]; }
    const std::string& word(std::int32_t id) const { return entries_[static_cast<std::size_t>(id)].word; }
    std::int64_t count(std::int32_t id) const { return entries_[static_cast<std::size_t>(id)].count; }

    std::int32_t id_of(std::string_view w) const {
        auto it = index_.find(w);
        return it == index_.end() ? kNotFound : it->second;
    }

private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, std::int32_t, detail::StringHash, std::equal_to<>> index_;
    std::int64_t total_tokens_ = 0;
};

/// Streaming word counter; feed tokens in corpus order, then finish().
class VocabBuilder {
public:
    void add(std::string_view token) {
        auto it = counts_.find(token);
        if (it == counts_.end()) {
            counts_.emplace(std::string(token), Slot{1, next_order_++});
        } else {
            ++it->second.count;
        }
    }

    /// Drops words with count < min_count and assigns ids by descending
    /// count, first-occurrence order breaking ties. Throws NoTrainableWords
    /// if nothing survives.
    Vocabulary finish(std::int64_t min_count) const {
        struct Ranked {
            const std::string* word;
            std::int64_t count;
            std::int64_t order;
        };
        std::vector<Ranked> ranked;
        ranked.reserve(counts_.size());
        for (const auto& [word, slot] : counts_) {
            if (slot.count >= min_count) ranked.push_back({&word, slot.count, slot.order});
        }
        if (ranked.empty()) throw NoTrainableWords();
        std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
            if (a.count != b.count) return a.count > b.count;
            return a.order < b.order;
        });
        std::vector<VocabEntry> entries;
        entries.reserve(ranked.size());
        std::int64_t total = 0;
        for (const Ranked& r : ranked) {
            entries.push_back({*r.word, r.count});
            total += r.count;
        }
        return Vocabulary(std::move(entries), total);
    }

private:
    struct Slot {
        std::int64_t count;
        std::int64_t order;
    };
    std::unordered_map<std::string, Slot, detail::StringHash, std::equal_to<>> counts_;
    std::int64_t next_order_ = 0;
};

/// min_count must be >= 1. Tokens may be any range of string-like values.
template <typename Range>
Vocabulary build_vocabulary(const Range& tokens, std::int64_t min_count) {
    VocabBuilder builder;
    for (const auto& t : tokens) builder.add(std::string_view(t));
    return builder.finish(min_count);
}

/// Single pass over a corpus file without materializing the token stream.
inline Vocabulary build_vocabulary_file(const std::string& path, std::int64_t min_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path);
    VocabBuilder builder;
    std::vector<char> buf(1 << 16);
    std::string pending;
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        std::string_view chunk(buf.data(), static_cast<std::size_t>(in.gcount()));
        std::size_t i = 0;
        while (i < chunk.size()) {
            if (is_token_separator(chunk[i])) {
                if (!pending.empty()) {
                    builder.add(pending);
                    pending.clear();
                }
                ++i;
            } else {
                std::size_t start = i;
                while (i < chunk.size() && !is_token_separator(chunk[i])) ++i;
                pending.append(chunk.substr(start, i - start));
            }
        }
    }
    if (!pending.empty()) builder.add(pending);
    return builder.finish(min_count);
}

/// Probability of keeping one occurrence of a word during training:
///   min(1, (sqrt(c/(s*T)) + 1) * (s*T)/c)
/// with c the word count, T the retained token total and s the sample rate.
/// Strictly decreasing in c, and exactly 1 once c/T <= s.
inline double keep_probability(std::int64_t count, std::int64_t total_tokens, double sample) {
    double budget = sample * static_cast<double>(total_tokens);
    double c = static_cast<double>(count);
    double p = (std::sqrt(c / budget) + 1.0) * budget / c;
    return p < 1.0 ? p : 1.0;
}

/// Byte range of an input file assigned to one worker. Boundaries always sit
/// right after a separator byte, so no token spans two shards.
struct CorpusShard {
    std::uint64_t byte_start = 0;
    std::uint64_t byte_end = 0;
};

/// Near-equal byte split into exactly num_workers shards. Cut points advance
/// to the next separator; trailing shards may be empty for tiny files.
inline std::vector<CorpusShard> shard(const std::string& path, std::int32_t num_workers) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path);
    in.seekg(0, std::ios::end);
    const std::uint64_t size = static_cast<std::uint64_t>(in.tellg());

    std::vector<std::uint64_t> cuts(static_cast<std::size_t>(num_workers) + 1);
    cuts[0] = 0;
    cuts[static_cast<std::size_t>(num_workers)] = size;
    for (std::int32_t i = 1; i < num_workers; ++i) {
        std::uint64_t p = size * static_cast<std::uint64_t>(i) / static_cast<std::uint64_t>(num_workers);
        // Advance p until the previous byte is a separator (or EOF), so the
        // shard starts exactly at a token start.
        if (p > 0) {
            in.clear();
            in.seekg(static_cast<std::streamoff>(p - 1));
            int c;
            while ((c = in.get()) != std::char_traits<char>::eof() && !is_token_separator(static_cast<char>(c)))
                ++p;
            if (c == std::char_traits<char>::eof())
                p = size;
            // p now points one past the separator we stopped on.
        }
        cuts[static_cast<std::size_t>(i)] = p;
    }
    for (std::size_t i = 1; i < cuts.size(); ++i) cuts[i] = std::max(cuts[i], cuts[i - 1]);

    std::vector<CorpusShard> shards(static_cast<std::size_t>(num_workers));
    for (std::int32_t i = 0; i < num_workers; ++i)
        shards[static_cast<std::size_t>(i)] = {cuts[static_cast<std::size_t>(i)], cuts[static_cast<std::size_t>(i) + 1]};
    return shards;
}

/// Sequential token reader over one shard, resettable for multi-iteration
/// training. A token that begins inside the shard is returned whole; the
/// aligned boundaries from shard() mean this never actually crosses byte_end.
class ShardReader {
public:
    ShardReader(const std::string& path, CorpusShard range) : range_(range) {
        in_.open(path, std::ios::binary);
        if (!in_) throw IoError("cannot open corpus file: " + path);
        reset();
    }

    void reset() {
        in_.clear();
        in_.seekg(static_cast<std::streamoff>(range_.byte_start));
        pos_ = range_.byte_start;
        buf_pos_ = buf_len_ = 0;
    }

    /// False once the shard is exhausted.
    bool next_token(std::string& token) {
        token.clear();
        // Skip separators; give up if the shard ends before a token starts.
        for (;;) {
            if (pos_ >= range_.byte_end) return false;
            int c = peek_byte();
            if (c < 0) return false;
            if (!is_token_separator(static_cast<char>(c))) break;
            advance();
        }
        for (;;) {
            int c = peek_byte();
            if (c < 0 || is_token_separator(static_cast<char>(c))) return true;
            token.push_back(static_cast<char>(c));
            advance();
        }
    }

private:
    int peek_byte() {
        if (buf_pos_ == buf_len_) {
            in_.read(buf_, sizeof(buf_));
            buf_len_ = static_cast<std::size_t>(in_.gcount());
            buf_pos_ = 0;
            if (buf_len_ == 0) return -1;
        }
        return static_cast<unsigned char>(buf_[buf_pos_]);
    }
    void advance() {
        ++buf_pos_;
        ++pos_;
    }

    std::ifstream in_;
    CorpusShard range_;
    std::uint64_t pos_ = 0;
    char buf_[1 << 16] = {};
    std::size_t buf_pos_ = 0;
    std::size_t buf_len_ = 0;
};

}  // namespace cachegram
