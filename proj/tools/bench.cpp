// Compares the OpenMP paths against their serial references on synthetic
// data: co-occurrence counting and full-batch training epochs. Both must
// produce bit-identical results no matter the thread count; the table shows
// whether they did and what the parallel path bought.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "namekit/context.hpp"
#include "namekit/cooccurrence.hpp"
#include "namekit/model.hpp"
#include "namekit/parallel.hpp"
#include "namekit/rng.hpp"
#include "namekit/specials.hpp"
#include "namekit/vocab.hpp"

using namespace namekit;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_row(const char* name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-22s %9.3fs %11.3fs %9.2fx   %s\n", name, serial_s, parallel_s,
                parallel_s > 0 ? serial_s / parallel_s : 0.0, identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    int scale = argc > 1 ? std::atoi(argv[1]) : 1;
    if (scale < 1) scale = 1;

#ifdef _OPENMP
    std::printf("threads available: %d\n", omp_get_max_threads());
#else
    std::printf("threads available: 1 (built without OpenMP)\n");
#endif
    std::printf("%-22s %10s %12s %10s   %s\n", "benchmark", "serial", "parallel", "speedup",
                "identical");

    Rng rng(42);

    {
        std::size_t vocab = 500;
        std::vector<std::vector<std::size_t>> seqs(static_cast<std::size_t>(4000) * scale);
        for (auto& s : seqs) {
            s.resize(60);
            for (auto& t : s) t = 1 + rng.index(vocab - 1);
        }
        auto t0 = std::chrono::steady_clock::now();
        CooccurrenceTable serial = build_cooccurrence_serial(seqs, 5);
        double serial_s = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        CooccurrenceTable parallel = build_cooccurrence(seqs, 5);
        double parallel_s = seconds_since(t0);
        print_row("cooccurrence", serial_s, parallel_s, serial.cells() == parallel.cells());
    }

    {
        std::size_t n_tokens = 80;
        std::vector<std::vector<std::string>> word_seqs;
        for (std::size_t i = 0; i < n_tokens; ++i) {
            word_seqs.push_back({"tok" + std::to_string(i), "tok" + std::to_string(i)});
        }
        Vocabulary vocab = Vocabulary::build(word_seqs, 1);

        ModelConfig cfg;
        cfg.embed_dim = 16;
        cfg.hidden_dim = 24;
        cfg.l_max = 24;
        cfg.max_name_len = 6;

        EmbeddingMatrix emb;
        emb.rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(vocab.size()), cfg.embed_dim);
        for (Eigen::Index i = 1; i < emb.rows.rows(); ++i) {
            for (Eigen::Index j = 0; j < emb.rows.cols(); ++j) {
                emb.rows(i, j) = 0.1 * rng.normal();
            }
        }

        auto random_seq = [&](std::size_t len) {
            TokenSeq seq;
            seq.tokens.resize(len);
            for (auto& t : seq.tokens) t = "tok" + std::to_string(rng.index(n_tokens));
            seq.true_length = len;
            return pad_truncate(std::move(seq), cfg.l_max);
        };
        std::vector<TrainExample> data(static_cast<std::size_t>(96) * scale);
        std::vector<std::vector<std::string>> names;
        for (auto& ex : data) {
            ex.bundle.mode = Mode::Suggestion;
            ex.bundle.internal = random_seq(20);
            ex.bundle.interaction = random_seq(24);
            ex.bundle.sibling = random_seq(12);
            ex.bundle.enclosing = random_seq(6);
            for (int t = 0; t < 3; ++t) ex.target.push_back("tok" + std::to_string(rng.index(n_tokens)));
            names.push_back(ex.target);
            ex.target.push_back(kEonToken);
        }

        ModelParams base = ModelParams::init(cfg, vocab.size(), 7);
        base.stats = build_bigram_stats(names);
        base.vocab_hash = vocab.hash();

        TrainConfig tc;
        tc.epochs = 3;
        tc.lr = 0.05;

        ModelParams serial_model = base;
        set_max_threads(1);
        auto t0 = std::chrono::steady_clock::now();
        std::vector<double> serial_losses = train(serial_model, data, emb, vocab, tc);
        double serial_s = seconds_since(t0);

        ModelParams parallel_model = base;
        set_max_threads(0);
        t0 = std::chrono::steady_clock::now();
        std::vector<double> parallel_losses = train(parallel_model, data, emb, vocab, tc);
        double parallel_s = seconds_since(t0);

        bool identical = serial_losses == parallel_losses;
        print_row("train epochs x3", serial_s, parallel_s, identical);
        if (!identical) return 1;
    }

    return 0;
}
