// Copyright (c) 2026 The cachegram authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cachegram/eval.hpp"
#include "cachegram/trainer.hpp"

namespace cachegram {

/// Grid sweep over worker counts and cache sizes, everything else held
/// fixed. Rows are emitted in sweep order: workers outer, cache sizes inner
/// in the order given.
struct BenchPlan {
    std::vector<std::int32_t> workers_list;
    std::vector<std::int32_t> cache_list;
    std::int32_t repetitions = 3;
    TrainConfig base;            // workers / cache_nodes overridden per cell
    std::string questions_path;  // empty: skip per-cell accuracy
    std::int32_t restrict_top = 30000;
    std::int32_t eval_threads = 1;

    // Grid-level checks only; per-cell configs are validated by train(), so
    // a bad cell becomes an error row instead of killing the sweep.
    void validate() const {
        if (workers_list.empty()) throw std::invalid_argument("bench needs at least one worker count");
        if (cache_list.empty()) throw std::invalid_argument("bench needs at least one cache size");
        if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
        for (std::int32_t w : workers_list)
            if (w < 1) throw std::invalid_argument("worker counts must be >= 1");
        for (std::int32_t k : cache_list)
            if (k < 0) throw std::invalid_argument("cache sizes must be >= 0");
    }
};

struct BenchRecord {
    std::int32_t workers = 0;
    std::int32_t cache_nodes = 0;
    std::int32_t flush_interval = 0;
    double wall_seconds = 0.0;        // median over repetitions
    double words_per_second = 0.0;
    std::optional<double> accuracy;   // analogy accuracy of the last repetition
    std::string error;                // non-empty: cell failed, timings invalid
};

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Runs the whole grid sequentially (cells must not disturb each other's
/// timings). Vocabulary and tree are built once; every cell re-trains from
/// the same seed. A failing cell is recorded and the sweep continues.
inline std::vector<BenchRecord> run_bench(const std::string& corpus_path, const BenchPlan& plan,
                                          std::ostream* log = nullptr) {
    plan.validate();
    const Vocabulary vocab = build_vocabulary_file(corpus_path, plan.base.min_count);
    const HuffmanTree tree = build_huffman_tree(vocab);

    QuestionSet questions;
    if (!plan.questions_path.empty()) questions = load_questions(plan.questions_path);

    std::vector<BenchRecord> records;
    records.reserve(plan.workers_list.size() * plan.cache_list.size());
    for (std::int32_t workers : plan.workers_list) {
        for (std::int32_t k : plan.cache_list) {
            BenchRecord rec;
            rec.workers = workers;
            rec.cache_nodes = k;
            rec.flush_interval = plan.base.flush_interval;
            try {
                TrainConfig config = plan.base;
                config.workers = workers;
                config.cache_nodes = k;
                const CacheSelection selection = select_cached_nodes(tree, k);

                std::vector<double> walls;
                walls.reserve(static_cast<std::size_t>(plan.repetitions));
                std::uint64_t words = 0;
                std::optional<Model> last_model;
                for (std::int32_t rep = 0; rep < plan.repetitions; ++rep) {
                    TrainStats stats;
                    last_model = train(corpus_path, vocab, tree, selection, config, &stats);
                    walls.push_back(stats.wall_seconds);
                    words = stats.words_processed;
                }
                rec.wall_seconds = median(walls);
                rec.words_per_second = rec.wall_seconds > 0.0 ? static_cast<double>(words) / rec.wall_seconds : 0.0;
                if (!plan.questions_path.empty()) {
                    const EvalReport report =
                        evaluate(to_embeddings(*last_model, vocab), questions, plan.restrict_top, plan.eval_threads);
                    if (auto acc = report.total.accuracy()) rec.accuracy = *acc;
                }
            } catch (const std::exception& e) {
                rec.error = e.what();
            }
            if (log) {
                if (rec.error.empty()) {
                    char buf[160];
                    std::snprintf(buf, sizeof(buf), "workers=%d cache=%d wall=%.3fs words/s=%.0f", rec.workers,
                                  rec.cache_nodes, rec.wall_seconds, rec.words_per_second);
                    *log << buf;
                    if (rec.accuracy) {
                        std::snprintf(buf, sizeof(buf), " accuracy=%.4f", *rec.accuracy);
                        *log << buf;
                    }
                    *log << '\n' << std::flush;
                } else {
                    *log << "workers=" << rec.workers << " cache=" << rec.cache_nodes << " FAILED: " << rec.error
                         << '\n'
                         << std::flush;
                }
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

/// Plot-ready CSV, LF line endings. Failed cells keep the swept columns,
/// leave the timing columns empty and put a quoted error message in the
/// accuracy column.
inline void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << "workers,cache_nodes,flush_interval,wall_seconds,words_per_second,accuracy\n";
    for (const auto& r : records) {
        out << r.workers << ',' << r.cache_nodes << ',' << r.flush_interval << ',';
        if (r.error.empty()) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.6f,%.3f,", r.wall_seconds, r.words_per_second);
            out << buf;
            if (r.accuracy) {
                std::snprintf(buf, sizeof(buf), "%.6f", *r.accuracy);
                out << buf;
            }
        } else {
            std::string quoted = r.error;
            std::size_t pos = 0;
            while ((pos = quoted.find('"', pos)) != std::string::npos) {
                quoted.replace(pos, 1, "\"\"");
                pos += 2;
            }
            out << ",,\"error: " << quoted << '"';
        }
        out << '\n';
    }
}

}  // namespace cachegram
