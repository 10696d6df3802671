#include "namekit/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "namekit/errors.hpp"

namespace namekit {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* want) {
    throw ConfigError("config key '" + key + "': cannot read '" + value + "' as " + want);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad(key, value, "a number");
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        bad(key, value, "a non-negative integer");
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) bad(key, value, "an integer");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    bad(key, value, "true or false");
}

Mode parse_mode(const std::string& key, const std::string& value) {
    if (value == "checking") return Mode::Checking;
    if (value == "suggestion") return Mode::Suggestion;
    bad(key, value, "checking or suggestion");
}

std::vector<ContextKind> parse_contexts(const std::string& key, const std::string& value) {
    std::vector<ContextKind> out;
    std::stringstream ss(value);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        piece = trim(piece);
        if (piece == "internal") out.push_back(ContextKind::Internal);
        else if (piece == "interaction") out.push_back(ContextKind::Interaction);
        else if (piece == "sibling") out.push_back(ContextKind::Sibling);
        else if (piece == "enclosing") out.push_back(ContextKind::Enclosing);
        else bad(key, piece, "a context name (internal, interaction, sibling, enclosing)");
    }
    return out;
}

std::string context_list(const std::vector<ContextKind>& contexts) {
    std::string out;
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        if (i) out += ",";
        out += context_name(contexts[i]);
    }
    return out;
}

// shortest round-tripping decimal form, so echoed configs are byte-stable
std::string num(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

void RunConfig::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw ConfigError(std::string("config: ") + msg);
    };
    require(threads >= 0, "threads must be >= 0");
    require(min_count >= 1, "min_count must be >= 1");
    require(negatives_per_method >= 1, "negatives_per_method must be >= 1");

    require(model.embed_dim >= 1, "embed_dim must be >= 1");
    require(model.hidden_dim >= 1, "hidden_dim must be >= 1");
    require(model.l_max >= 1, "l_max must be >= 1");
    require(model.max_name_len >= 5,
            "max_name_len must be >= 5 (the checker needs that much width)");
    require(model.beam_width >= 1, "beam_width must be >= 1");
    require(!model.contexts.empty(), "contexts must name at least one context");
    std::set<ContextKind> seen(model.contexts.begin(), model.contexts.end());
    require(seen.size() == model.contexts.size(), "contexts must not repeat");
    require(model.init_scale > 0.0, "init_scale must be positive");

    require(glove.window >= 1 && glove.window <= 40, "glove_window must be in [1, 40]");
    require(glove.epochs >= 1, "glove_epochs must be >= 1");
    require(glove.lr > 0.0, "glove_lr must be positive");
    require(glove.x_max > 0.0, "glove_x_max must be positive");
    require(glove.alpha > 0.0 && glove.alpha <= 1.0, "glove_alpha must be in (0, 1]");

    require(train.epochs >= 1, "train_epochs must be >= 1");
    require(train.lr > 0.0, "train_lr must be positive");
    require(train.momentum >= 0.0 && train.momentum < 1.0, "train_momentum must be in [0, 1)");
    require(train.clip_norm > 0.0, "train_clip_norm must be positive");
    require(train.target_loss >= 0.0, "train_target_loss must be >= 0");

    require(checker.epochs >= 1, "checker_epochs must be >= 1");
    require(checker.lr > 0.0, "checker_lr must be positive");
    require(checker.momentum >= 0.0 && checker.momentum < 1.0,
            "checker_momentum must be in [0, 1)");
    require(checker.clip_norm > 0.0, "checker_clip_norm must be positive");
    require(checker.target_loss >= 0.0, "checker_target_loss must be >= 0");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> assigned;

    // setter per key; each consumes one value string
    std::map<std::string, std::function<void(const std::string&, const std::string&)>> keys;
    keys["corpus_dir"] = [&](const std::string&, const std::string& v) { cfg.corpus_dir = v; };
    keys["out_dir"] = [&](const std::string&, const std::string& v) { cfg.out_dir = v; };
    keys["mode"] = [&](const std::string& k, const std::string& v) {
        cfg.mode = parse_mode(k, v);
    };
    keys["seed"] = [&](const std::string& k, const std::string& v) {
        cfg.seed = parse_u64(k, v);
    };
    keys["threads"] = [&](const std::string& k, const std::string& v) {
        cfg.threads = parse_int(k, v);
    };
    keys["min_count"] = [&](const std::string& k, const std::string& v) {
        cfg.min_count = parse_u64(k, v);
    };
    keys["negatives_per_method"] = [&](const std::string& k, const std::string& v) {
        cfg.negatives_per_method = static_cast<std::size_t>(parse_u64(k, v));
    };
    keys["equal_weights"] = [&](const std::string& k, const std::string& v) {
        cfg.equal_weights = parse_bool(k, v);
    };

    keys["embed_dim"] = [&](const std::string& k, const std::string& v) {
        cfg.model.embed_dim = parse_int(k, v);
    };
    keys["hidden_dim"] = [&](const std::string& k, const std::string& v) {
        cfg.model.hidden_dim = parse_int(k, v);
    };
    keys["l_max"] = [&](const std::string& k, const std::string& v) {
        cfg.model.l_max = static_cast<std::size_t>(parse_u64(k, v));
    };
    keys["max_name_len"] = [&](const std::string& k, const std::string& v) {
        cfg.model.max_name_len = static_cast<std::size_t>(parse_u64(k, v));
    };
    keys["beam_width"] = [&](const std::string& k, const std::string& v) {
        cfg.model.beam_width = static_cast<std::size_t>(parse_u64(k, v));
    };
    keys["contexts"] = [&](const std::string& k, const std::string& v) {
        cfg.model.contexts = parse_contexts(k, v);
    };
    keys["use_copy"] = [&](const std::string& k, const std::string& v) {
        cfg.model.use_copy = parse_bool(k, v);
    };
    keys["use_noncopy"] = [&](const std::string& k, const std::string& v) {
        cfg.model.use_noncopy = parse_bool(k, v);
    };
    keys["init_scale"] = [&](const std::string& k, const std::string& v) {
        cfg.model.init_scale = parse_double(k, v);
    };
    keys["theta_non_init"] = [&](const std::string& k, const std::string& v) {
        cfg.model.theta_non_init = parse_double(k, v);
    };

    keys["glove_window"] = [&](const std::string& k, const std::string& v) {
        cfg.glove.window = parse_int(k, v);
    };
    keys["glove_epochs"] = [&](const std::string& k, const std::string& v) {
        cfg.glove.epochs = parse_int(k, v);
    };
    keys["glove_lr"] = [&](const std::string& k, const std::string& v) {
        cfg.glove.lr = parse_double(k, v);
    };
    keys["glove_x_max"] = [&](const std::string& k, const std::string& v) {
        cfg.glove.x_max = parse_double(k, v);
    };
    keys["glove_alpha"] = [&](const std::string& k, const std::string& v) {
        cfg.glove.alpha = parse_double(k, v);
    };

    keys["train_epochs"] = [&](const std::string& k, const std::string& v) {
        cfg.train.epochs = static_cast<std::size_t>(parse_u64(k, v));
    };
    keys["train_lr"] = [&](const std::string& k, const std::string& v) {
        cfg.train.lr = parse_double(k, v);
    };
    keys["train_momentum"] = [&](const std::string& k, const std::string& v) {
        cfg.train.momentum = parse_double(k, v);
    };
    keys["train_clip_norm"] = [&](const std::string& k, const std::string& v) {
        cfg.train.clip_norm = parse_double(k, v);
    };
    keys["train_target_loss"] = [&](const std::string& k, const std::string& v) {
        cfg.train.target_loss = parse_double(k, v);
    };

    keys["checker_epochs"] = [&](const std::string& k, const std::string& v) {
        cfg.checker.epochs = static_cast<std::size_t>(parse_u64(k, v));
    };
    keys["checker_lr"] = [&](const std::string& k, const std::string& v) {
        cfg.checker.lr = parse_double(k, v);
    };
    keys["checker_momentum"] = [&](const std::string& k, const std::string& v) {
        cfg.checker.momentum = parse_double(k, v);
    };
    keys["checker_clip_norm"] = [&](const std::string& k, const std::string& v) {
        cfg.checker.clip_norm = parse_double(k, v);
    };
    keys["checker_target_loss"] = [&](const std::string& k, const std::string& v) {
        cfg.checker.target_loss = parse_double(k, v);
    };

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = keys.find(key);
        if (it == keys.end()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
        }
        if (!assigned.insert(key).second) {
            throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                              "' given twice");
        }
        it->second(key, value);
    }

    // the embedding dimension and seed have one source of truth
    cfg.glove.dim = cfg.model.embed_dim;
    cfg.glove.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "# run\n";
    out << "mode = " << mode_name(cfg.mode) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "threads = " << cfg.threads << "\n";
    if (!cfg.corpus_dir.empty()) out << "corpus_dir = " << cfg.corpus_dir << "\n";
    if (!cfg.out_dir.empty()) out << "out_dir = " << cfg.out_dir << "\n";
    out << "\n# vocabulary and embeddings\n";
    out << "min_count = " << cfg.min_count << "\n";
    out << "embed_dim = " << cfg.model.embed_dim << "\n";
    out << "glove_window = " << cfg.glove.window << "\n";
    out << "glove_epochs = " << cfg.glove.epochs << "\n";
    out << "glove_lr = " << num(cfg.glove.lr) << "\n";
    out << "glove_x_max = " << num(cfg.glove.x_max) << "\n";
    out << "glove_alpha = " << num(cfg.glove.alpha) << "\n";
    out << "\n# model\n";
    out << "hidden_dim = " << cfg.model.hidden_dim << "\n";
    out << "l_max = " << cfg.model.l_max << "\n";
    out << "max_name_len = " << cfg.model.max_name_len << "\n";
    out << "beam_width = " << cfg.model.beam_width << "\n";
    out << "contexts = " << context_list(cfg.model.contexts) << "\n";
    out << "use_copy = " << (cfg.model.use_copy ? "true" : "false") << "\n";
    out << "use_noncopy = " << (cfg.model.use_noncopy ? "true" : "false") << "\n";
    out << "equal_weights = " << (cfg.equal_weights ? "true" : "false") << "\n";
    out << "init_scale = " << num(cfg.model.init_scale) << "\n";
    out << "theta_non_init = " << num(cfg.model.theta_non_init) << "\n";
    out << "\n# sequence model training\n";
    out << "train_epochs = " << cfg.train.epochs << "\n";
    out << "train_lr = " << num(cfg.train.lr) << "\n";
    out << "train_momentum = " << num(cfg.train.momentum) << "\n";
    out << "train_clip_norm = " << num(cfg.train.clip_norm) << "\n";
    out << "train_target_loss = " << num(cfg.train.target_loss) << "\n";
    out << "\n# consistency checker training\n";
    out << "negatives_per_method = " << cfg.negatives_per_method << "\n";
    out << "checker_epochs = " << cfg.checker.epochs << "\n";
    out << "checker_lr = " << num(cfg.checker.lr) << "\n";
    out << "checker_momentum = " << num(cfg.checker.momentum) << "\n";
    out << "checker_clip_norm = " << num(cfg.checker.clip_norm) << "\n";
    out << "checker_target_loss = " << num(cfg.checker.target_loss) << "\n";
    return out.str();
}

}  // namespace namekit
