// Copyright (c) 2026 The cachegram authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cachegram/corpus.hpp"
#include "cachegram/huffman.hpp"
#include "cachegram/model.hpp"
#include "cachegram/rng.hpp"
#include "cachegram/vec_ops.hpp"

namespace cachegram {

struct TrainConfig {
    std::int32_t dim = 100;
    std::int32_t window = 5;
    std::int64_t min_count = 5;
    double sample = 1e-3;        // 0 disables subsampling
    float alpha0 = 0.025f;       // initial learning rate, linear decay
    std::int32_t iterations = 5;
    std::int32_t workers = 1;
    std::int32_t cache_nodes = 31;    // K; 0 = plain lock-free updates
    std::int32_t flush_interval = 10; // u, in trained center words
    std::uint64_t seed = 1;

    void validate() const {
        if (dim < 1) throw std::invalid_argument("dim must be >= 1");
        if (window < 1) throw std::invalid_argument("window must be >= 1");
        if (min_count < 1) throw std::invalid_argument("min-count must be >= 1");
        if (sample < 0.0) throw std::invalid_argument("sample must be >= 0");
        if (!(alpha0 > 0.0f)) throw std::invalid_argument("alpha must be > 0");
        if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
        if (workers < 1) throw std::invalid_argument("workers must be >= 1");
        if (cache_nodes < 0) throw std::invalid_argument("cache-nodes must be >= 0");
        if (flush_interval < 1) throw std::invalid_argument("flush-interval must be >= 1");
    }
};

/// Shared monotone progress across workers; drives the learning-rate decay.
/// Workers add in 10k-word batches, so the counter is cheap to maintain.
struct ProgressCounter {
    std::atomic<std::uint64_t> words_processed{0};
    std::uint64_t total_words = 0;
};

/// Linear decay from alpha0 to the floor alpha0 * 1e-4.
inline float update_alpha(std::uint64_t words_processed, std::uint64_t total_words, float alpha0) {
    double frac = static_cast<double>(words_processed) / (static_cast<double>(total_words) + 1.0);
    float alpha = alpha0 * static_cast<float>(1.0 - frac);
    float floor = alpha0 * 1e-4f;
    return alpha > floor ? alpha : floor;
}

/// Effective half-window for one center word, uniform in [1, window].
inline std::int32_t shrink_window(std::int32_t window, Rng& rng) {
    return window - static_cast<std::int32_t>(rng.next_below(static_cast<std::uint32_t>(window)));
}

/// Per-worker working copies of the hot node rows. A row is copied out of
/// shared memory on first touch (keeping the acquisition snapshot), updated
/// privately, and written back as a delta: shared += cached - original.
/// Deltas from concurrent workers therefore add up instead of overwriting
/// one another, and the shared row is untouched between acquire and flush.
class NodeCache {
public:
    NodeCache(const CacheSelection& selection, std::int32_t dim, std::int32_t flush_interval)
        : selection_(&selection),
          dim_(dim),
          flush_interval_(flush_interval),
          cached_(static_cast<std::size_t>(selection.size()) * static_cast<std::size_t>(dim)),
          original_(static_cast<std::size_t>(selection.size()) * static_cast<std::size_t>(dim)),
          is_cached_(static_cast<std::size_t>(selection.size()), 0) {
        acquired_.reserve(static_cast<std::size_t>(selection.size()));
    }

    bool is_cached(std::int32_t slot) const { return is_cached_[static_cast<std::size_t>(slot)] != 0; }
    std::int32_t words_since_flush() const { return words_since_flush_; }

    float* row(std::int32_t slot) { return cached_.data() + static_cast<std::size_t>(slot) * static_cast<std::size_t>(dim_); }
    const float* original(std::int32_t slot) const {
        return original_.data() + static_cast<std::size_t>(slot) * static_cast<std::size_t>(dim_);
    }

    /// Working row for a hot node; copies the shared row on first touch.
    float* acquire(std::int32_t slot, const float* shared_row) {
        float* working = row(slot);
        if (!is_cached_[static_cast<std::size_t>(slot)]) {
            float* snapshot = original_.data() + static_cast<std::size_t>(slot) * static_cast<std::size_t>(dim_);
            copy(shared_row, working, dim_);
            copy(working, snapshot, dim_);
            is_cached_[static_cast<std::size_t>(slot)] = 1;
            acquired_.push_back(slot);
        }
        return working;
    }

    /// Writes every acquired row's delta back into the shared matrix and
    /// empties the cache.
    void flush(Model& model) {
        for (std::int32_t slot : acquired_) {
            const std::size_t off = static_cast<std::size_t>(slot) * static_cast<std::size_t>(dim_);
            float* shared = model.node_weight(selection_->node_at(slot));
            const float* work = cached_.data() + off;
            const float* snap = original_.data() + off;
            for (std::int32_t d = 0; d < dim_; ++d) {
                float delta = work[d] - snap[d];
                shared[d] += delta;
            }
            is_cached_[static_cast<std::size_t>(slot)] = 0;
        }
        acquired_.clear();
        words_since_flush_ = 0;
    }

    /// Counts one trained center word; true when a flush is due.
    bool note_center_trained() { return ++words_since_flush_ >= flush_interval_; }

private:
    const CacheSelection* selection_;
    std::int32_t dim_;
    std::int32_t flush_interval_;
    std::vector<float> cached_;
    std::vector<float> original_;
    std::vector<std::uint8_t> is_cached_;
    std::vector<std::int32_t> acquired_;
    std::int32_t words_since_flush_ = 0;
};

/// One skipgram/HS step for a center word: every context word in the shrunk
/// window trains against the center's tree path. For each (node, turn) the
/// gradient is g = (1 - turn - f) * alpha with f = sigmoid(v_ctx . w_node);
/// the hidden-layer buffer accumulates g * w_node using the row value from
/// before that node's own update, and the context vector moves once at the
/// end. Hot node rows go through the cache, everything else hits shared
/// memory directly.
template <typename SigmoidFn>
inline void train_center(std::int32_t center, std::span<const std::int32_t> sentence, std::size_t center_pos,
                         std::int32_t half_window, Model& model, const HuffmanTree& tree,
                         const CacheSelection& selection, NodeCache& cache, float alpha, float* hidden,
                         const SigmoidFn& sigmoid) {
    const std::int32_t dim = model.dim();
    const auto path = tree.path(center);
    const std::size_t lo = center_pos >= static_cast<std::size_t>(half_window) ? center_pos - static_cast<std::size_t>(half_window) : 0;
    const std::size_t hi = std::min(sentence.size() - 1, center_pos + static_cast<std::size_t>(half_window));
    for (std::size_t pos = lo; pos <= hi; ++pos) {
        if (pos == center_pos) continue;
        float* context_vec = model.input_vector(sentence[pos]);
        fill_zero(hidden, dim);
        for (const PathStep& step : path) {
            float* used;
            const std::int32_t slot = selection.slot_of(step.node);
            if (slot >= 0) {
                used = cache.acquire(slot, model.node_weight(step.node));
            } else {
                used = model.node_weight(step.node);
            }
            const float f = sigmoid(dot(context_vec, used, dim));
            const float g = (1.0f - static_cast<float>(step.turn) - f) * alpha;
            axpy(g, used, hidden, dim);
            axpy(g, context_vec, used, dim);
        }
        axpy(1.0f, hidden, context_vec, dim);
    }
}

struct TrainStats {
    std::uint64_t words_processed = 0;  // in-vocabulary occurrences read, all iterations
    double wall_seconds = 0.0;
    double words_per_second = 0.0;
};

namespace detail {

inline constexpr std::size_t kMaxSentence = 1000;
inline constexpr std::uint64_t kAlphaBatch = 10000;

struct WorkerContext {
    const std::string* path;
    const Vocabulary* vocab;
    const HuffmanTree* tree;
    const CacheSelection* selection;
    const TrainConfig* config;
    const std::vector<float>* keep_prob;  // empty when subsampling is off
    const SigmoidTable* sigmoid;
    Model* model;
    ProgressCounter* progress;
};

inline void train_worker(const WorkerContext& ctx, std::int32_t worker_index, CorpusShard shard_range) {
    const TrainConfig& cfg = *ctx.config;
    ShardReader reader(*ctx.path, shard_range);
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(worker_index)));
    NodeCache cache(*ctx.selection, cfg.dim, cfg.flush_interval);
    std::vector<float> hidden(static_cast<std::size_t>(cfg.dim));
    std::vector<std::int32_t> sentence;
    sentence.reserve(kMaxSentence);
    const std::vector<float>& keep_prob = *ctx.keep_prob;

    float alpha = update_alpha(ctx.progress->words_processed.load(std::memory_order_relaxed),
                               ctx.progress->total_words, cfg.alpha0);
    std::uint64_t unreported = 0;
    std::string token;

    for (std::int32_t iter = 0; iter < cfg.iterations; ++iter) {
        reader.reset();
        bool stream_live = true;
        while (stream_live) {
            sentence.clear();
            while (sentence.size() < kMaxSentence && (stream_live = reader.next_token(token))) {
                const std::int32_t id = ctx.vocab->id_of(token);
                if (id < 0) continue;  // out-of-vocabulary tokens are skipped silently
                if (++unreported >= kAlphaBatch) {
                    const std::uint64_t done =
                        ctx.progress->words_processed.fetch_add(unreported, std::memory_order_relaxed) + unreported;
                    unreported = 0;
                    alpha = update_alpha(done, ctx.progress->total_words, cfg.alpha0);
                }
                if (!keep_prob.empty()) {
                    const float keep = keep_prob[static_cast<std::size_t>(id)];
                    if (keep < 1.0f && rng.next_float() >= keep) continue;
                }
                sentence.push_back(id);
            }
            for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
                const std::int32_t half_window = shrink_window(cfg.window, rng);
                train_center(sentence[pos], std::span<const std::int32_t>(sentence), pos, half_window, *ctx.model,
                             *ctx.tree, *ctx.selection, cache, alpha, hidden.data(), *ctx.sigmoid);
                if (cache.note_center_trained()) cache.flush(*ctx.model);
            }
        }
        cache.flush(*ctx.model);  // end of shard: no delta survives the pass
    }
    if (unreported > 0) ctx.progress->words_processed.fetch_add(unreported, std::memory_order_relaxed);
}

}  // namespace detail

/// Runs config.workers workers, one corpus shard and one node cache each,
/// over config.iterations passes. The weight matrices are shared without
/// locks; hot rows are shielded by the per-worker caches, remaining races on
/// cold rows are accepted as SGD noise. Throws the first worker error after
/// all workers have stopped.
inline Model train(const std::string& corpus_path, const Vocabulary& vocab, const HuffmanTree& tree,
                   const CacheSelection& selection, const TrainConfig& config, TrainStats* stats = nullptr) {
    config.validate();
    if (vocab.size() != tree.leaf_count())
        throw std::invalid_argument("vocabulary and tree sizes disagree");
    if (selection.inner_node_count() != tree.inner_count())
        throw std::invalid_argument("cache selection was built from a different tree");

    Model model = init_model(vocab.size(), config.dim, config.seed);
    SigmoidTable sigmoid;

    std::vector<float> keep_prob;
    if (config.sample > 0.0) {
        keep_prob.resize(static_cast<std::size_t>(vocab.size()));
        for (std::int32_t w = 0; w < vocab.size(); ++w)
            keep_prob[static_cast<std::size_t>(w)] =
                static_cast<float>(keep_probability(vocab.count(w), vocab.total_tokens(), config.sample));
    }

    ProgressCounter progress;
    progress.total_words = static_cast<std::uint64_t>(config.iterations) * static_cast<std::uint64_t>(vocab.total_tokens());

    const std::vector<CorpusShard> shards = shard(corpus_path, config.workers);

    detail::WorkerContext ctx{&corpus_path, &vocab, &tree, &selection, &config, &keep_prob, &sigmoid, &model, &progress};

    const auto start = std::chrono::steady_clock::now();
    if (config.workers == 1) {
        detail::train_worker(ctx, 0, shards[0]);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(config.workers));
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.workers));
        for (std::int32_t i = 0; i < config.workers; ++i) {
            threads.emplace_back([&, i] {
                try {
                    detail::train_worker(ctx, i, shards[static_cast<std::size_t>(i)]);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (std::int32_t i = 0; i < config.workers; ++i) {
            if (errors[static_cast<std::size_t>(i)]) {
                try {
                    std::rethrow_exception(errors[static_cast<std::size_t>(i)]);
                } catch (const std::exception& e) {
                    throw std::runtime_error("worker " + std::to_string(i) + " failed: " + e.what());
                }
            }
        }
    }
    const auto end = std::chrono::steady_clock::now();

    if (stats) {
        stats->words_processed = progress.words_processed.load();
        stats->wall_seconds = std::chrono::duration<double>(end - start).count();
        stats->words_per_second =
            stats->wall_seconds > 0.0 ? static_cast<double>(stats->words_processed) / stats->wall_seconds : 0.0;
    }
    return model;
}

}  // namespace cachegram
