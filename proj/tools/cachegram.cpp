// Copyright (c) 2026 The cachegram authors
// SPDX-License-Identifier: Apache-2.0
//
// cachegram command line: train / eval / bench.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cachegram/bench.hpp"
#include "cachegram/corpus.hpp"
#include "cachegram/eval.hpp"
#include "cachegram/huffman.hpp"
#include "cachegram/model.hpp"
#include "cachegram/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int default_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

std::vector<std::int32_t> parse_int_list(const std::string& csv, const std::string& flag) {
    std::vector<std::int32_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "expected a comma-separated list of integers, got \"" + csv + "\"");
        }
    }
    if (out.empty()) throw CLI::ValidationError(flag, "expected a non-empty comma-separated list of integers");
    return out;
}

// The classic embedding tools spell their flags with a single dash
// (-train, -size, ...). CLI11 wants two, so known single-dash spellings are
// canonicalized before parsing and both styles work.
std::vector<std::string> canonicalize_flags(int argc, char** argv) {
    static const char* kLongFlags[] = {
        "train", "output",    "size",         "window", "sample",       "min-count",  "threads",
        "iter",  "alpha",     "binary",       "seed",   "cache-nodes",  "flush-interval",
        "model", "questions", "restrict-top", "csv",    "workers-list", "cache-list",
        "reps",  "save-text", "eval-threads",
    };
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc));
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.size() > 2 && arg[0] == '-' && arg[1] != '-') {
            const std::string body = arg.substr(1, arg.find('=') == std::string::npos ? std::string::npos : arg.find('=') - 1);
            for (const char* flag : kLongFlags) {
                if (body == flag) {
                    arg.insert(arg.begin(), '-');
                    break;
                }
            }
        }
        args.push_back(std::move(arg));
    }
    return args;
}

struct TrainFlags {
    std::string input;
    std::string output;
    int binary = 0;
    cachegram::TrainConfig config;
};

void add_hyperparameter_flags(CLI::App& cmd, cachegram::TrainConfig& config) {
    cmd.add_option("--size", config.dim, "Vector dimensionality")->capture_default_str();
    cmd.add_option("--window", config.window, "Max half-window of context words per side")->capture_default_str();
    cmd.add_option("--sample", config.sample, "Subsampling rate for frequent words (0 disables)")
        ->capture_default_str();
    cmd.add_option("--min-count", config.min_count, "Drop words occurring fewer times than this")
        ->capture_default_str();
    cmd.add_option("--alpha", config.alpha0, "Initial learning rate")->capture_default_str();
    cmd.add_option("--iter", config.iterations, "Training passes over the corpus")->capture_default_str();
    cmd.add_option("--cache-nodes", config.cache_nodes, "Hot tree nodes cached per worker (0 disables)")
        ->capture_default_str();
    cmd.add_option("--flush-interval", config.flush_interval, "Center words trained between cache flushes")
        ->capture_default_str();
    cmd.add_option("--seed", config.seed, "Random seed")->capture_default_str();
}

int run_train(const TrainFlags& flags, const std::string& save_text_path) {
    using namespace cachegram;
    const Vocabulary vocab = build_vocabulary_file(flags.input, flags.config.min_count);
    std::printf("vocabulary: %d words, %lld training tokens\n", vocab.size(),
                static_cast<long long>(vocab.total_tokens()));
    const HuffmanTree tree = build_huffman_tree(vocab);
    const CacheSelection selection = select_cached_nodes(tree, flags.config.cache_nodes);

    TrainStats stats;
    const Model model = train(flags.input, vocab, tree, selection, flags.config, &stats);
    std::printf("trained %llu words in %.1fs (%.0f words/s, %d workers, %d cached nodes)\n",
                static_cast<unsigned long long>(stats.words_processed), stats.wall_seconds, stats.words_per_second,
                flags.config.workers, selection.size());

    if (flags.binary)
        save_binary(model, vocab, flags.output);
    else
        save_text(model, vocab, flags.output);
    std::printf("model written to %s\n", flags.output.c_str());
    if (!save_text_path.empty()) {
        save_text(model, vocab, save_text_path);
        std::printf("text model written to %s\n", save_text_path.c_str());
    }
    return kExitOk;
}

int run_eval(const std::string& model_path, const std::string& questions_path, int restrict_top, int threads,
             const std::string& csv_path) {
    using namespace cachegram;
    const LoadedEmbeddings embeddings = load_embeddings(model_path);
    const QuestionSet questions = load_questions(questions_path);
    const EvalReport report = evaluate(embeddings, questions, restrict_top, threads);
    write_report_text(std::cout, report);
    if (!csv_path.empty()) {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw IoError("cannot write report: " + csv_path);
        write_report_csv(out, report);
    }
    return kExitOk;
}

int run_bench(const std::string& input, const cachegram::BenchPlan& plan, const std::string& csv_path) {
    using namespace cachegram;
    const std::vector<BenchRecord> records = run_bench(input, plan, &std::cerr);
    if (csv_path.empty()) {
        write_bench_csv(std::cout, records);
    } else {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw IoError("cannot write CSV: " + csv_path);
        write_bench_csv(out, records);
        std::printf("benchmark CSV written to %s\n", csv_path.c_str());
    }
    for (const auto& r : records)
        if (!r.error.empty()) return kExitRuntime;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cachegram: parallel skipgram/hierarchical-softmax embeddings with per-worker hot-node caching",
                 "cachegram"};
    app.require_subcommand(1);

    // train
    TrainFlags train_flags;
    train_flags.config.workers = default_threads();
    std::string save_text_path;
    CLI::App* train_cmd = app.add_subcommand("train", "Train embeddings on a plain-text corpus");
    train_cmd->add_option("--train", train_flags.input, "Input corpus (whitespace-separated plain text)")
        ->required();
    train_cmd->add_option("--output", train_flags.output, "Output model file")->required();
    train_cmd->add_option("--threads", train_flags.config.workers, "Parallel workers")->capture_default_str();
    train_cmd->add_option("--binary", train_flags.binary, "1: binary model format, 0: text")->capture_default_str();
    train_cmd->add_option("--save-text", save_text_path, "Also write a text-format copy here");
    add_hyperparameter_flags(*train_cmd, train_flags.config);

    // eval
    std::string eval_model, eval_questions, eval_csv;
    int eval_restrict = 30000;
    int eval_threads = 1;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Word-analogy accuracy of a model file");
    eval_cmd->add_option("--model", eval_model, "Model file (text or binary)")->required();
    eval_cmd->add_option("--questions", eval_questions, "Question file (\": section\" headers, 4 words per line)")
        ->required();
    eval_cmd->add_option("--restrict-top", eval_restrict, "Evaluate against the N most frequent words (0: all)")
        ->capture_default_str();
    eval_cmd->add_option("--threads", eval_threads, "Evaluation threads")->capture_default_str();
    eval_cmd->add_option("--csv", eval_csv, "Also write the per-section report as CSV");

    // bench
    cachegram::BenchPlan plan;
    plan.base.iterations = 1;
    std::string bench_input, bench_csv, workers_csv = "1,2,4,8", cache_csv = "0,1,15,31";
    CLI::App* bench_cmd = app.add_subcommand("bench", "Sweep workers x cached-nodes, emit timing CSV");
    bench_cmd->add_option("--train", bench_input, "Input corpus")->required();
    bench_cmd->add_option("--output", bench_csv, "CSV output path (default: stdout)");
    bench_cmd->add_option("--workers-list", workers_csv, "Comma-separated worker counts")->capture_default_str();
    bench_cmd->add_option("--cache-list", cache_csv, "Comma-separated cached-node counts")->capture_default_str();
    bench_cmd->add_option("--reps", plan.repetitions, "Repetitions per cell (median wall time)")
        ->capture_default_str();
    bench_cmd->add_option("--questions", plan.questions_path, "Question file: adds per-cell analogy accuracy");
    bench_cmd->add_option("--restrict-top", plan.restrict_top, "Vocabulary cap for per-cell accuracy")
        ->capture_default_str();
    bench_cmd
        ->add_option("--eval-threads", plan.eval_threads, "Threads for per-cell accuracy evaluation")
        ->capture_default_str();
    add_hyperparameter_flags(*bench_cmd, plan.base);

    std::vector<std::string> args = canonicalize_flags(argc, argv);
    try {
        // CLI11 parses reversed argv.
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" || e.get_name() == "CallForVersion")
            return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (train_cmd->parsed()) return run_train(train_flags, save_text_path);
        if (eval_cmd->parsed()) {
            if (eval_restrict < 0) throw CLI::ValidationError("--restrict-top", "must be >= 0");
            return run_eval(eval_model, eval_questions, eval_restrict, eval_threads, eval_csv);
        }
        if (bench_cmd->parsed()) {
            plan.workers_list = parse_int_list(workers_csv, "--workers-list");
            plan.cache_list = parse_int_list(cache_csv, "--cache-list");
            return run_bench(bench_input, plan, bench_csv);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
