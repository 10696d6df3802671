#include "namekit/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "namekit/errors.hpp"

namespace namekit {

namespace {

// Fixed little-endian layout so checkpoints are byte-stable across runs and
// readable regardless of host endianness.
void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

void put_str(std::ostream& out, const std::string& s) {
    put_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

struct Reader {
    std::ifstream in;
    std::string path;

    Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
        if (!in) throw IoError("cannot read checkpoint: " + p);
    }

    [[noreturn]] void fail(const char* what) {
        throw IoError(std::string("checkpoint ") + path + ": " + what);
    }

    std::uint64_t u64() {
        unsigned char b[8];
        in.read(reinterpret_cast<char*>(b), 8);
        if (in.gcount() != 8) fail("truncated");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }

    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::string str() {
        std::uint64_t n = u64();
        if (n > (1ull << 24)) fail("implausible string length");
        std::string s(n, '\0');
        in.read(s.data(), static_cast<std::streamsize>(n));
        if (static_cast<std::uint64_t>(in.gcount()) != n) fail("truncated");
        return s;
    }

    void magic(const char* expect) {
        char b[8];
        in.read(b, 8);
        if (in.gcount() != 8 || std::memcmp(b, expect, 8) != 0) fail("bad magic");
    }

    void done() {
        if (in.peek() != std::ifstream::traits_type::eof()) fail("trailing bytes");
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    return out;
}

// row-major matrix block: rows, cols, then each row left to right
void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    put_u64(out, static_cast<std::uint64_t>(m.rows()));
    put_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

Eigen::MatrixXd get_matrix(Reader& r) {
    std::uint64_t rows = r.u64();
    std::uint64_t cols = r.u64();
    if (rows > (1ull << 24) || cols > (1ull << 24)) r.fail("implausible matrix shape");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.f64();
    return m;
}

void put_vector(std::ostream& out, const Eigen::VectorXd& v) {
    put_u64(out, static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(out, v(i));
}

Eigen::VectorXd get_vector(Reader& r) {
    std::uint64_t n = r.u64();
    if (n > (1ull << 28)) r.fail("implausible vector length");
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = r.f64();
    return v;
}

}  // namespace

void save_embedding(const std::string& path, const Vocabulary& vocab,
                    const EmbeddingMatrix& emb) {
    if (static_cast<std::size_t>(emb.rows.rows()) != vocab.size())
        throw DimensionMismatch("save_embedding: matrix rows != vocabulary size");
    std::ofstream out = open_out(path);
    out.write("NKEMB001", 8);
    put_u64(out, 1);  // layout version
    put_u64(out, vocab.size());
    put_u64(out, static_cast<std::uint64_t>(emb.dim()));
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        put_str(out, vocab.tokens[i]);
        put_u64(out, vocab.freq[i]);
    }
    for (Eigen::Index r = 0; r < emb.rows.rows(); ++r)
        for (Eigen::Index c = 0; c < emb.rows.cols(); ++c) put_f64(out, emb.rows(r, c));
    if (!out) throw IoError("write failed: " + path);
}

EmbeddingCheckpoint load_embedding(const std::string& path) {
    Reader r(path);
    r.magic("NKEMB001");
    if (r.u64() != 1) r.fail("unsupported version");
    std::uint64_t n = r.u64();
    std::uint64_t d = r.u64();
    if (n < 3 || n > (1ull << 24) || d < 1 || d > (1ull << 16))
        r.fail("implausible embedding shape");

    EmbeddingCheckpoint cp;
    cp.vocab.tokens.reserve(n);
    cp.vocab.freq.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        cp.vocab.tokens.push_back(r.str());
        cp.vocab.freq.push_back(r.u64());
    }
    if (cp.vocab.tokens[kPadIndex] != kPadToken || cp.vocab.tokens[kUnkIndex] != kUnkToken ||
        cp.vocab.tokens[kEonIndex] != kEonToken) {
        r.fail("reserved tokens out of place");
    }
    for (std::size_t i = 0; i < cp.vocab.tokens.size(); ++i)
        cp.vocab.index[cp.vocab.tokens[i]] = i;
    if (cp.vocab.index.size() != cp.vocab.tokens.size()) r.fail("duplicate vocabulary token");

    cp.emb.rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < cp.emb.rows.rows(); ++i)
        for (Eigen::Index j = 0; j < cp.emb.rows.cols(); ++j) cp.emb.rows(i, j) = r.f64();
    r.done();
    return cp;
}

void save_model(const std::string& path, const ModelParams& params) {
    std::ofstream out = open_out(path);
    out.write("NKMODEL1", 8);
    put_u64(out, 1);  // layout version

    const ModelConfig& cfg = params.cfg;
    put_u64(out, static_cast<std::uint64_t>(cfg.embed_dim));
    put_u64(out, static_cast<std::uint64_t>(cfg.hidden_dim));
    put_u64(out, cfg.l_max);
    put_u64(out, cfg.max_name_len);
    put_u64(out, cfg.beam_width);
    put_u64(out, cfg.contexts.size());
    for (ContextKind kind : cfg.contexts) put_u64(out, static_cast<std::uint64_t>(kind));
    put_u64(out, cfg.use_copy ? 1 : 0);
    put_u64(out, cfg.use_noncopy ? 1 : 0);
    put_f64(out, cfg.init_scale);
    put_f64(out, cfg.theta_non_init);

    put_u64(out, params.vocab_hash);
    put_u64(out, params.vocab_size());

    // tensors in tensor_spans order; sizes written so truncation is caught
    ModelParams copy = params;
    for (const TensorSpan& span : tensor_spans(copy)) {
        put_u64(out, span.size);
        for (std::size_t i = 0; i < span.size; ++i) put_f64(out, span.data[i]);
    }

    put_u64(out, params.stats.unigram.size());
    for (const auto& [tok, count] : params.stats.unigram) {
        put_str(out, tok);
        put_u64(out, count);
    }
    put_u64(out, params.stats.bigram.size());
    for (const auto& [pair, count] : params.stats.bigram) {
        put_str(out, pair.first);
        put_str(out, pair.second);
        put_u64(out, count);
    }
    if (!out) throw IoError("write failed: " + path);
}

ModelParams load_model(const std::string& path, std::uint64_t expected_vocab_hash) {
    Reader r(path);
    r.magic("NKMODEL1");
    if (r.u64() != 1) r.fail("unsupported version");

    ModelConfig cfg;
    cfg.embed_dim = static_cast<int>(r.u64());
    cfg.hidden_dim = static_cast<int>(r.u64());
    cfg.l_max = static_cast<std::size_t>(r.u64());
    cfg.max_name_len = static_cast<std::size_t>(r.u64());
    cfg.beam_width = static_cast<std::size_t>(r.u64());
    std::uint64_t n_ctx = r.u64();
    if (n_ctx == 0 || n_ctx > kContextCount) r.fail("implausible context count");
    cfg.contexts.clear();
    for (std::uint64_t i = 0; i < n_ctx; ++i) {
        std::uint64_t kind = r.u64();
        if (kind >= kContextCount) r.fail("unknown context kind");
        cfg.contexts.push_back(static_cast<ContextKind>(kind));
    }
    cfg.use_copy = r.u64() != 0;
    cfg.use_noncopy = r.u64() != 0;
    cfg.init_scale = r.f64();
    cfg.theta_non_init = r.f64();
    if (cfg.embed_dim < 1 || cfg.embed_dim > (1 << 16) || cfg.hidden_dim < 1 ||
        cfg.hidden_dim > (1 << 16) || cfg.l_max < 1 || cfg.l_max > (1ull << 24)) {
        r.fail("implausible model dimensions");
    }

    std::uint64_t vocab_hash = r.u64();
    if (vocab_hash != expected_vocab_hash) {
        throw IoError("checkpoint " + path +
                      ": model was trained against a different vocabulary");
    }
    std::uint64_t vocab_size = r.u64();
    if (vocab_size < 3 || vocab_size > (1ull << 24)) r.fail("implausible vocabulary size");

    // init gives the tensors their shapes; every value is then overwritten
    ModelParams params = ModelParams::init(cfg, static_cast<std::size_t>(vocab_size), 0);
    params.vocab_hash = vocab_hash;
    for (TensorSpan& span : tensor_spans(params)) {
        if (r.u64() != span.size) r.fail("tensor size mismatch");
        for (std::size_t i = 0; i < span.size; ++i) span.data[i] = r.f64();
    }

    std::uint64_t n_uni = r.u64();
    if (n_uni > (1ull << 24)) r.fail("implausible unigram count");
    for (std::uint64_t i = 0; i < n_uni; ++i) {
        std::string tok = r.str();
        params.stats.unigram[tok] = r.u64();
    }
    std::uint64_t n_bi = r.u64();
    if (n_bi > (1ull << 24)) r.fail("implausible bigram count");
    for (std::uint64_t i = 0; i < n_bi; ++i) {
        std::string prev = r.str();
        std::string next = r.str();
        params.stats.bigram[{prev, next}] = r.u64();
    }
    r.done();
    return params;
}

void save_checker(const std::string& path, const CheckerParams& params) {
    std::ofstream out = open_out(path);
    out.write("NKCNN001", 8);
    put_u64(out, 1);  // layout version
    put_u64(out, static_cast<std::uint64_t>(params.length));
    put_u64(out, static_cast<std::uint64_t>(params.embed_dim));
    put_matrix(out, params.k1);
    put_vector(out, params.b1);
    put_matrix(out, params.k2);
    put_vector(out, params.b2);
    put_matrix(out, params.wd);
    put_vector(out, params.bd);
    if (!out) throw IoError("write failed: " + path);
}

CheckerParams load_checker(const std::string& path) {
    Reader r(path);
    r.magic("NKCNN001");
    if (r.u64() != 1) r.fail("unsupported version");
    std::uint64_t length = r.u64();
    std::uint64_t embed_dim = r.u64();
    if (length < 5 || length > (1ull << 16) || embed_dim < 1 || embed_dim > (1ull << 16))
        r.fail("implausible checker shape");

    CheckerParams params = CheckerParams::init(static_cast<int>(length),
                                               static_cast<int>(embed_dim), 0);
    params.k1 = get_matrix(r);
    params.b1 = get_vector(r);
    params.k2 = get_matrix(r);
    params.b2 = get_vector(r);
    params.wd = get_matrix(r);
    params.bd = get_vector(r);
    if (params.k1.rows() != 16 || params.k1.cols() != 2 * 3 * params.embed_dim ||
        params.b1.size() != 16 || params.k2.rows() != 32 || params.k2.cols() != 16 * 3 ||
        params.b2.size() != 32 || params.wd.rows() != 2 || params.wd.cols() != 32 ||
        params.bd.size() != 2) {
        r.fail("tensor shape mismatch");
    }
    r.done();
    return params;
}

}  // namespace namekit
