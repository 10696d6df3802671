#pragma once

#include <cstdint>
#include <string>

#include "namekit/cnn.hpp"
#include "namekit/context.hpp"
#include "namekit/glove.hpp"
#include "namekit/model.hpp"

namespace namekit {

// Everything a run needs, collected from one key=value file. Unknown keys are
// rejected so a typo cannot silently fall back to a default. Paths may also
// arrive via command-line flags, which take precedence.
struct RunConfig {
    std::string corpus_dir;  // directory holding the ingested corpus files
    std::string out_dir;     // artifact destination
    Mode mode = Mode::Suggestion;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 keeps the runtime default

    std::uint64_t min_count = 1;               // vocabulary frequency cutoff
    std::size_t negatives_per_method = 1;      // corrupted names per positive
    bool equal_weights = false;                // freeze context weights at 1/I

    ModelConfig model;
    GloveConfig glove;        // dim and seed are tied to embed_dim / seed
    TrainConfig train;        // on_epoch is never set from a file
    CheckerTrainConfig checker;

    // Throws ConfigError on any out-of-range value or impossible combination.
    void validate() const;
};

// Parses and validates. '#' starts a comment, blank lines are skipped, keys
// may appear at most once. Throws ConfigError on unknown or malformed input.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// The configuration echoed back in file syntax with every key present, so a
// run can record exactly what it used.
std::string config_to_text(const RunConfig& cfg);

}  // namespace namekit
