// Copyright (c) 2026 The cachegram authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cachegram/corpus.hpp"
#include "cachegram/errors.hpp"
#include "cachegram/rng.hpp"

namespace cachegram {

/// The two weight matrices: input vectors, one row per word, and output
/// weights, one row per Huffman inner node. Both are shared mutable state
/// during training (lock-free, see trainer.hpp) and row-major float32.
class Model {
public:
    Model(std::int32_t vocab_size, std::int32_t dim) : vocab_size_(vocab_size), node_count_(vocab_size - 1), dim_(dim) {
        if (vocab_size < 2) throw std::invalid_argument("model needs a vocabulary of at least two words");
        if (dim < 1) throw std::invalid_argument("vector dimension must be >= 1");
        input_.assign(static_cast<std::size_t>(vocab_size) * static_cast<std::size_t>(dim), 0.0f);
        weights_.assign(static_cast<std::size_t>(vocab_size - 1) * static_cast<std::size_t>(dim), 0.0f);
    }

    std::int32_t vocab_size() const { return vocab_size_; }
    std::int32_t node_count() const { return node_count_; }
    std::int32_t dim() const { return dim_; }

    float* input_vector(std::int32_t w) {
        return input_.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(dim_);
    }
    const float* input_vector(std::int32_t w) const {
        return input_.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(dim_);
    }
    float* node_weight(std::int32_t n) {
        return weights_.data() + static_cast<std::size_t>(n) * static_cast<std::size_t>(dim_);
    }
    const float* node_weight(std::int32_t n) const {
        return weights_.data() + static_cast<std::size_t>(n) * static_cast<std::size_t>(dim_);
    }

    std::span<const float> input_matrix() const { return input_; }
    std::span<const float> weight_matrix() const { return weights_; }
    std::span<float> input_matrix() { return input_; }
    std::span<float> weight_matrix() { return weights_; }

private:
    std::int32_t vocab_size_;
    std::int32_t node_count_;
    std::int32_t dim_;
    std::vector<float> input_;
    std::vector<float> weights_;
};

/// Input vectors i.i.d. uniform in [-0.5/D, 0.5/D), node weights all zero.
/// Same seed, same model, bit for bit.
inline Model init_model(std::int32_t vocab_size, std::int32_t dim, std::uint64_t seed) {
    Model model(vocab_size, dim);
    Rng rng(mix_seed(seed, 0x1817));
    const float inv_dim = 1.0f / static_cast<float>(dim);
    for (float& x : model.input_matrix()) x = (rng.next_float() - 0.5f) * inv_dim;
    return model;
}

inline double exact_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Precomputed logistic function on [-6, 6], 1000 buckets, clamped outside.
/// Bucket-center sampling keeps the absolute error under 2e-3, well inside
/// the 0.01 budget the training loop tolerates.
class SigmoidTable {
public:
    static constexpr float kDomain = 6.0f;
    static constexpr std::int32_t kResolution = 1000;

    SigmoidTable() {
        values_.resize(kResolution);
        const double width = 2.0 * kDomain / kResolution;
        for (std::int32_t i = 0; i < kResolution; ++i) {
            double x = -kDomain + (i + 0.5) * width;
            values_[static_cast<std::size_t>(i)] = static_cast<float>(exact_sigmoid(x));
        }
    }

    float value(float x) const {
        if (x <= -kDomain) return values_.front();
        if (x >= kDomain) return values_.back();
        auto idx = static_cast<std::int32_t>((x + kDomain) * (kResolution / (2.0f * kDomain)));
        if (idx >= kResolution) idx = kResolution - 1;
        return values_[static_cast<std::size_t>(idx)];
    }

    float operator()(float x) const { return value(x); }

private:
    std::vector<float> values_;
};

// ---------------------------------------------------------------------------
// Model files.
//
// Text:    "V D\n" then one line per word, "word v1 ... vD\n", in id order.
// Binary:  "V D\n" then per word: the word bytes, one space, D little-endian
//          float32 values, one newline.
//
// Only the input vectors are stored; node weights are training-internal.
// The binary layout matches the common embedding-tool readers byte for byte.
// ---------------------------------------------------------------------------

inline void save_text(const Model& model, const Vocabulary& vocab, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot write model file: " + path);
    std::fprintf(f, "%d %d\n", model.vocab_size(), model.dim());
    for (std::int32_t w = 0; w < model.vocab_size(); ++w) {
        std::fputs(vocab.word(w).c_str(), f);
        const float* row = model.input_vector(w);
        for (std::int32_t d = 0; d < model.dim(); ++d) std::fprintf(f, " %.6f", static_cast<double>(row[d]));
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0) throw IoError("cannot write model file: " + path);
}

inline void save_binary(const Model& model, const Vocabulary& vocab, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot write model file: " + path);
    std::fprintf(f, "%d %d\n", model.vocab_size(), model.dim());
    for (std::int32_t w = 0; w < model.vocab_size(); ++w) {
        std::fputs(vocab.word(w).c_str(), f);
        std::fputc(' ', f);
        std::fwrite(model.input_vector(w), sizeof(float), static_cast<std::size_t>(model.dim()), f);
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0) throw IoError("cannot write model file: " + path);
}

/// What a model file stores: the word list in id order plus the input
/// vectors. Node weights and counts are not part of the interchange format.
struct LoadedEmbeddings {
    std::int32_t dim = 0;
    std::vector<std::string> words;
    std::vector<float> vectors;  // words.size() x dim, row-major

    std::int32_t size() const { return static_cast<std::int32_t>(words.size()); }
    const float* vector(std::int32_t w) const {
        return vectors.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(dim);
    }
};

/// In-memory counterpart of save + load, for evaluating a freshly trained
/// model without a file round trip.
inline LoadedEmbeddings to_embeddings(const Model& model, const Vocabulary& vocab) {
    LoadedEmbeddings out;
    out.dim = model.dim();
    out.words.reserve(static_cast<std::size_t>(vocab.size()));
    for (std::int32_t w = 0; w < vocab.size(); ++w) out.words.push_back(vocab.word(w));
    out.vectors.assign(model.input_matrix().begin(), model.input_matrix().end());
    return out;
}

namespace detail {

struct Header {
    std::int64_t vocab = 0;
    std::int64_t dim = 0;
};

inline Header read_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": malformed header: empty file");
    Header h;
    const char* begin = line.data();
    const char* end = line.data() + line.size();
    auto r1 = std::from_chars(begin, end, h.vocab);
    if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ' ')
        throw ParseError(path + ": malformed header: expected \"<vocab> <dim>\", got \"" + line + "\"");
    auto r2 = std::from_chars(r1.ptr + 1, end, h.dim);
    if (r2.ec != std::errc() || r2.ptr != end)
        throw ParseError(path + ": malformed header: expected \"<vocab> <dim>\", got \"" + line + "\"");
    if (h.vocab <= 0 || h.dim <= 0)
        throw ParseError(path + ": malformed header: non-positive sizes in \"" + line + "\"");
    return h;
}

}  // namespace detail

inline LoadedEmbeddings load_embeddings_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    auto header = detail::read_header(in, path);

    LoadedEmbeddings out;
    out.dim = static_cast<std::int32_t>(header.dim);
    out.words.reserve(static_cast<std::size_t>(header.vocab));
    out.vectors.resize(static_cast<std::size_t>(header.vocab) * static_cast<std::size_t>(header.dim));
    for (std::int64_t w = 0; w < header.vocab; ++w) {
        std::string word;
        int c;
        while ((c = in.get()) != std::char_traits<char>::eof() && c != ' ') {
            if (c != '\n') word.push_back(static_cast<char>(c));
        }
        if (c == std::char_traits<char>::eof())
            throw ParseError(path + ": truncated row " + std::to_string(w) + ": unterminated word");
        float* row = out.vectors.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(header.dim);
        in.read(reinterpret_cast<char*>(row), static_cast<std::streamsize>(sizeof(float) * static_cast<std::size_t>(header.dim)));
        if (in.gcount() != static_cast<std::streamsize>(sizeof(float) * static_cast<std::size_t>(header.dim)))
            throw ParseError(path + ": truncated row " + std::to_string(w) + " for word \"" + word + "\"");
        out.words.push_back(std::move(word));
    }
    return out;
}

inline LoadedEmbeddings load_embeddings_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file: " + path);
    auto header = detail::read_header(in, path);

    LoadedEmbeddings out;
    out.dim = static_cast<std::int32_t>(header.dim);
    out.words.reserve(static_cast<std::size_t>(header.vocab));
    out.vectors.resize(static_cast<std::size_t>(header.vocab) * static_cast<std::size_t>(header.dim));
    std::string line;
    for (std::int64_t w = 0; w < header.vocab; ++w) {
        if (!std::getline(in, line)) throw ParseError(path + ": truncated row " + std::to_string(w));
        std::size_t space = line.find(' ');
        if (space == std::string::npos || space == 0)
            throw ParseError(path + ": row " + std::to_string(w) + ": expected \"word v1 ... vD\"");
        out.words.emplace_back(line.substr(0, space));
        float* row = out.vectors.data() + static_cast<std::size_t>(w) * static_cast<std::size_t>(header.dim);
        const char* p = line.data() + space;
        const char* end = line.data() + line.size();
        for (std::int64_t d = 0; d < header.dim; ++d) {
            while (p != end && *p == ' ') ++p;
            auto r = std::from_chars(p, end, row[d]);
            if (r.ec != std::errc())
                throw ParseError(path + ": row " + std::to_string(w) + ": dimension mismatch: expected " +
                                 std::to_string(header.dim) + " values");
            p = r.ptr;
        }
        while (p != end && *p == ' ') ++p;
        if (p != end)
            throw ParseError(path + ": row " + std::to_string(w) + ": dimension mismatch: trailing values beyond " +
                             std::to_string(header.dim));
    }
    return out;
}

/// Reads either format. Binary rows carry raw float bytes, so a row that is
/// pure printable ASCII identifies a text file.
inline LoadedEmbeddings load_embeddings(const std::string& path) {
    bool looks_binary = false;
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open model file: " + path);
        std::string header_line;
        std::getline(in, header_line);
        char probe[512];
        in.read(probe, sizeof(probe));
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            unsigned char c = static_cast<unsigned char>(probe[i]);
            if (c != '\n' && c != '\r' && c != '\t' && (c < 0x20 || c > 0x7e)) {
                looks_binary = true;
                break;
            }
        }
    }
    return looks_binary ? load_embeddings_binary(path) : load_embeddings_text(path);
}

}  // namespace cachegram
