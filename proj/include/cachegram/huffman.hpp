// Copyright (c) 2026 The cachegram authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cachegram/corpus.hpp"

namespace cachegram {

/// One step of a root-to-leaf path: the inner node crossed and the branch
/// taken toward the leaf (0 = first-merged child, 1 = second-merged child).
struct PathStep {
    std::int32_t node;
    std::uint8_t turn;
};

/// Binary Huffman tree over word frequencies. Inner nodes are numbered
/// 0..V-2 in merge order, so the root is always inner node V-2. node_usage
/// of an inner node is the total count of the leaf words beneath it, which
/// is exactly how many training updates touch its weight row per epoch.
class HuffmanTree {
public:
    std::int32_t inner_count() const { return inner_count_; }
    std::int32_t leaf_count() const { return static_cast<std::int32_t>(path_offsets_.size()) - 1; }
    std::int32_t root_id() const { return inner_count_ - 1; }

    std::span<const PathStep> path(std::int32_t word) const {
        auto begin = path_offsets_[static_cast<std::size_t>(word)];
        auto end = path_offsets_[static_cast<std::size_t>(word) + 1];
        return {steps_.data() + begin, end - begin};
    }

    std::int64_t node_usage(std::int32_t node) const { return usage_[static_cast<std::size_t>(node)]; }
    const std::vector<std::int64_t>& usage() const { return usage_; }

    friend HuffmanTree build_huffman_tree(const Vocabulary& vocab);

private:
    std::int32_t inner_count_ = 0;
    std::vector<std::int64_t> usage_;
    std::vector<PathStep> steps_;
    std::vector<std::size_t> path_offsets_;
};

/// Standard greedy construction: repeatedly merge the two lowest-count nodes,
/// ties broken by lower node id (leaves are 0..V-1, inner nodes count up from
/// V in merge order). Deterministic for a given vocabulary.
inline HuffmanTree build_huffman_tree(const Vocabulary& vocab) {
    const std::int32_t v = vocab.size();
    if (v == 0) throw NoTrainableWords();
    if (v == 1)
        throw std::invalid_argument("hierarchical softmax needs at least two words, got a single-word vocabulary");

    const std::int32_t total_nodes = 2 * v - 1;
    std::vector<std::int64_t> count(static_cast<std::size_t>(total_nodes));
    std::vector<std::int32_t> parent(static_cast<std::size_t>(total_nodes), -1);
    std::vector<std::uint8_t> turn(static_cast<std::size_t>(total_nodes), 0);

    using Item = std::pair<std::int64_t, std::int32_t>;  // (count, node id)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::int32_t w = 0; w < v; ++w) {
        count[static_cast<std::size_t>(w)] = vocab.count(w);
        heap.emplace(vocab.count(w), w);
    }

    for (std::int32_t next = v; next < total_nodes; ++next) {
        auto [ca, a] = heap.top();
        heap.pop();
        auto [cb, b] = heap.top();
        heap.pop();
        count[static_cast<std::size_t>(next)] = ca + cb;
        parent[static_cast<std::size_t>(a)] = next;
        parent[static_cast<std::size_t>(b)] = next;
        turn[static_cast<std::size_t>(a)] = 0;
        turn[static_cast<std::size_t>(b)] = 1;
        heap.emplace(ca + cb, next);
    }

    HuffmanTree tree;
    tree.inner_count_ = v - 1;
    tree.usage_.resize(static_cast<std::size_t>(v - 1));
    for (std::int32_t n = 0; n < v - 1; ++n)
        tree.usage_[static_cast<std::size_t>(n)] = count[static_cast<std::size_t>(v + n)];

    tree.path_offsets_.resize(static_cast<std::size_t>(v) + 1);
    std::vector<PathStep> reversed;
    for (std::int32_t w = 0; w < v; ++w) {
        tree.path_offsets_[static_cast<std::size_t>(w)] = tree.steps_.size();
        reversed.clear();
        std::int32_t node = w;
        while (parent[static_cast<std::size_t>(node)] != -1) {
            reversed.push_back({parent[static_cast<std::size_t>(node)] - v, turn[static_cast<std::size_t>(node)]});
            node = parent[static_cast<std::size_t>(node)];
        }
        tree.steps_.insert(tree.steps_.end(), reversed.rbegin(), reversed.rend());
    }
    tree.path_offsets_[static_cast<std::size_t>(v)] = tree.steps_.size();
    return tree;
}

/// usage(n) = sum of count(w) over words whose path contains n.
inline const std::vector<std::int64_t>& node_usage_frequency(const HuffmanTree& tree) { return tree.usage(); }

/// The cache-eligible inner nodes: the min(K, V-1) rows with the highest
/// usage, i.e. the rows most often written during training. slot_of gives a
/// dense cache slot per hot node and -1 for everything else.
class CacheSelection {
public:
    CacheSelection() = default;

    std::int32_t size() const { return static_cast<std::int32_t>(hot_nodes_.size()); }
    std::span<const std::int32_t> hot_nodes() const { return hot_nodes_; }
    std::int32_t node_at(std::int32_t slot) const { return hot_nodes_[static_cast<std::size_t>(slot)]; }

    /// Number of inner nodes of the tree this selection was built from.
    std::int32_t inner_node_count() const { return static_cast<std::int32_t>(slot_of_.size()); }

    std::int32_t slot_of(std::int32_t node) const { return slot_of_[static_cast<std::size_t>(node)]; }

    friend CacheSelection select_cached_nodes(const HuffmanTree& tree, std::int32_t k);

private:
    std::vector<std::int32_t> hot_nodes_;  // slot -> node id, hottest first
    std::vector<std::int32_t> slot_of_;    // node id -> slot or -1
};

/// K = 0 disables caching entirely. Ranking is by usage, ties by lower node
/// id; the prefix property holds: the K-selection is contained in the (K+1)-
/// selection.
inline CacheSelection select_cached_nodes(const HuffmanTree& tree, std::int32_t k) {
    if (k < 0) throw std::invalid_argument("cache node count must be >= 0");
    const std::int32_t inner = tree.inner_count();
    const std::int32_t take = std::min(k, inner);

    std::vector<std::int32_t> order(static_cast<std::size_t>(inner));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&tree](std::int32_t a, std::int32_t b) {
                          if (tree.node_usage(a) != tree.node_usage(b))
                              return tree.node_usage(a) > tree.node_usage(b);
                          return a < b;
                      });

    CacheSelection sel;
    sel.hot_nodes_.assign(order.begin(), order.begin() + take);
    sel.slot_of_.assign(static_cast<std::size_t>(inner), -1);
    for (std::int32_t slot = 0; slot < take; ++slot)
        sel.slot_of_[static_cast<std::size_t>(sel.hot_nodes_[static_cast<std::size_t>(slot)])] = slot;
    return sel;
}

}  // namespace cachegram
