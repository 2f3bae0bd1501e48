// Copyright (c) 2026 The cachegram authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "cachegram/corpus.hpp"
#include "cachegram/errors.hpp"
#include "cachegram/model.hpp"
#include "cachegram/vec_ops.hpp"

namespace cachegram {

/// "a is to b as c is to d", grouped under the most recent ": section" line.
struct AnalogyQuestion {
    std::string a, b, c, d;
    std::int32_t section = 0;
};

struct QuestionSet {
    std::vector<std::string> sections;
    std::vector<AnalogyQuestion> questions;
};

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// Question-words file: ": section-name" lines open sections, every other
/// non-blank line holds exactly four whitespace-separated words. Words are
/// lowercased on load to match lowercase training corpora.
inline QuestionSet load_questions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open question file: " + path);
    QuestionSet set;
    std::string line;
    std::int64_t line_no = 0;
    std::int32_t section = -1;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (tokens[0].size() >= 1 && tokens[0][0] == ':') {
            std::string name;
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                std::string_view t = tokens[i];
                if (i == 0) t.remove_prefix(1);
                if (t.empty()) continue;
                if (!name.empty()) name.push_back(' ');
                name += t;
            }
            if (name.empty()) name = "(unnamed)";
            set.sections.push_back(name);
            section = static_cast<std::int32_t>(set.sections.size()) - 1;
            continue;
        }
        if (tokens.size() != 4)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 4 words per question, got " +
                             std::to_string(tokens.size()));
        if (section < 0) {
            set.sections.push_back("(no section)");
            section = 0;
        }
        set.questions.push_back(
            {to_lower(tokens[0]), to_lower(tokens[1]), to_lower(tokens[2]), to_lower(tokens[3]), section});
    }
    return set;
}

/// 3CosAdd answering over unit-normalized vectors, restricted to the
/// restrict_top most frequent words (0 = whole vocabulary). Built once per
/// model; answering is then a dense scan.
class AnalogySolver {
public:
    AnalogySolver(const LoadedEmbeddings& embeddings, std::int32_t restrict_top)
        : dim_(embeddings.dim),
          size_(restrict_top > 0 ? std::min(embeddings.size(), restrict_top) : embeddings.size()) {
        normalized_.resize(static_cast<std::size_t>(size_) * static_cast<std::size_t>(dim_));
        for (std::int32_t w = 0; w < size_; ++w) {
            const float* src = embeddings.vector(w);
            float* dst = row(w);
            const float norm = std::sqrt(dot(src, src, dim_));
            if (norm > 0.0f) {
                for (std::int32_t d = 0; d < dim_; ++d) dst[d] = src[d] / norm;
            } else {
                for (std::int32_t d = 0; d < dim_; ++d) dst[d] = 0.0f;
            }
        }
        index_.reserve(static_cast<std::size_t>(size_));
        for (std::int32_t w = 0; w < size_; ++w) index_.emplace(embeddings.words[static_cast<std::size_t>(w)], w);
    }

    std::int32_t vocab_size() const { return size_; }

    /// Id within the restricted vocabulary, or -1.
    std::int32_t id_of(std::string_view word) const {
        auto it = index_.find(std::string(word));
        return it == index_.end() ? -1 : it->second;
    }

    /// argmax_w cos(v(b) - v(a) + v(c), v(w)) excluding a, b, c; ties go to
    /// the lower (more frequent) word id.
    std::int32_t answer(std::int32_t a, std::int32_t b, std::int32_t c) const {
        std::vector<float> target(static_cast<std::size_t>(dim_));
        const float* va = row(a);
        const float* vb = row(b);
        const float* vc = row(c);
        for (std::int32_t d = 0; d < dim_; ++d)
            target[static_cast<std::size_t>(d)] = vb[d] - va[d] + vc[d];

        std::int32_t best = -1;
        float best_score = 0.0f;
        for (std::int32_t w = 0; w < size_; ++w) {
            if (w == a || w == b || w == c) continue;
            const float score = dot(target.data(), row(w), dim_);
            if (best < 0 || score > best_score) {
                best = w;
                best_score = score;
            }
        }
        return best;
    }

private:
    const float* row(std::int32_t w) const {
        return normalized_.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(dim_);
    }
    float* row(std::int32_t w) {
        return normalized_.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(dim_);
    }

    std::int32_t dim_;
    std::int32_t size_;
    std::vector<float> normalized_;
    std::unordered_map<std::string, std::int32_t> index_;
};

/// One-shot convenience wrapper; prefer AnalogySolver for batches.
inline std::string answer_analogy(const LoadedEmbeddings& embeddings, std::string_view a, std::string_view b,
                                  std::string_view c, std::int32_t restrict_top) {
    AnalogySolver solver(embeddings, restrict_top);
    const std::int32_t ia = solver.id_of(a), ib = solver.id_of(b), ic = solver.id_of(c);
    if (ia < 0 || ib < 0 || ic < 0) return "";
    const std::int32_t best = solver.answer(ia, ib, ic);
    return best < 0 ? "" : embeddings.words[static_cast<std::size_t>(best)];
}

struct SectionResult {
    std::string name;
    std::int64_t attempted = 0;
    std::int64_t skipped = 0;
    std::int64_t correct = 0;

    /// Empty when nothing was attempted.
    std::optional<double> accuracy() const {
        if (attempted == 0) return std::nullopt;
        return static_cast<double>(correct) / static_cast<double>(attempted);
    }
};

struct EvalReport {
    std::vector<SectionResult> sections;
    SectionResult total{"TOTAL"};
};

/// Questions with any word outside the (restricted) vocabulary are skipped,
/// not counted as wrong. Batches may run on several threads; results are
/// merged at the end and do not depend on the thread count.
inline EvalReport evaluate(const LoadedEmbeddings& embeddings, const QuestionSet& questions,
                           std::int32_t restrict_top, std::int32_t threads = 1) {
    AnalogySolver solver(embeddings, restrict_top);
    EvalReport report;
    report.sections.reserve(questions.sections.size());
    for (const auto& name : questions.sections) report.sections.push_back({name});

    struct Resolved {
        std::int32_t a, b, c, d, section;
    };
    std::vector<Resolved> batch;
    batch.reserve(questions.questions.size());
    for (const auto& q : questions.questions) {
        const std::int32_t ia = solver.id_of(q.a), ib = solver.id_of(q.b), ic = solver.id_of(q.c),
                           id = solver.id_of(q.d);
        if (ia < 0 || ib < 0 || ic < 0 || id < 0) {
            ++report.sections[static_cast<std::size_t>(q.section)].skipped;
            ++report.total.skipped;
            continue;
        }
        batch.push_back({ia, ib, ic, id, q.section});
    }

    std::vector<std::uint8_t> correct(batch.size(), 0);
    const std::int32_t n_threads = std::max<std::int32_t>(1, std::min<std::int32_t>(threads, static_cast<std::int32_t>(batch.size())));
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            correct[i] = solver.answer(batch[i].a, batch[i].b, batch[i].c) == batch[i].d ? 1 : 0;
    };
    if (n_threads <= 1) {
        worker(0, batch.size());
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        const std::size_t chunk = (batch.size() + static_cast<std::size_t>(n_threads) - 1) / static_cast<std::size_t>(n_threads);
        for (std::int32_t t = 0; t < n_threads; ++t) {
            const std::size_t begin = static_cast<std::size_t>(t) * chunk;
            const std::size_t end = std::min(batch.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < batch.size(); ++i) {
        auto& section = report.sections[static_cast<std::size_t>(batch[i].section)];
        ++section.attempted;
        ++report.total.attempted;
        if (correct[i]) {
            ++section.correct;
            ++report.total.correct;
        }
    }
    return report;
}

inline void write_report_text(std::ostream& out, const EvalReport& report) {
    auto line = [&out](const SectionResult& r) {
        char acc[32];
        if (auto a = r.accuracy())
            std::snprintf(acc, sizeof(acc), "%.2f%%", *a * 100.0);
        else
            std::snprintf(acc, sizeof(acc), "n/a");
        out << r.name << ": " << acc << " (" << r.correct << "/" << r.attempted << " correct, " << r.skipped
            << " skipped)\n";
    };
    for (const auto& s : report.sections) line(s);
    line(report.total);
}

/// CSV schema: section,attempted,skipped,correct,accuracy with accuracy in
/// [0,1] (n/a when nothing was attempted). The TOTAL row comes last.
inline void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "section,attempted,skipped,correct,accuracy\n";
    auto line = [&out](const SectionResult& r) {
        out << r.name << ',' << r.attempted << ',' << r.skipped << ',' << r.correct << ',';
        if (auto acc = r.accuracy())
            out << *acc;
        else
            out << "n/a";
        out << '\n';
    };
    for (const auto& s : report.sections) line(s);
    line(report.total);
}

}  // namespace cachegram
