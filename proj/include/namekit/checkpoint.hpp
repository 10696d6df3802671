#pragma once

#include <cstdint>
#include <string>

#include "namekit/cnn.hpp"
#include "namekit/embedding.hpp"
#include "namekit/model.hpp"
#include "namekit/vocab.hpp"

namespace namekit {

// Binary artifact files. Layouts are documented in docs/FORMATS.md; all three
// loaders throw IoError on a bad magic, a truncated file, or trailing bytes.

// Embeddings travel with the vocabulary that indexes them (magic NKEMB001).
struct EmbeddingCheckpoint {
    Vocabulary vocab;
    EmbeddingMatrix emb;
};

void save_embedding(const std::string& path, const Vocabulary& vocab,
                    const EmbeddingMatrix& emb);
EmbeddingCheckpoint load_embedding(const std::string& path);

// Model checkpoint (magic NKMODEL1) holds the configuration, every parameter
// tensor, the bigram statistics, and the vocabulary hash. Loading refuses a
// checkpoint whose hash disagrees with the vocabulary it will run against.
void save_model(const std::string& path, const ModelParams& params);
ModelParams load_model(const std::string& path, std::uint64_t expected_vocab_hash);

// Consistency checker checkpoint (magic NKCNN001).
void save_checker(const std::string& path, const CheckerParams& params);
CheckerParams load_checker(const std::string& path);

}  // namespace namekit
