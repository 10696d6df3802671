#include "namekit/context.hpp"

#include <json.hpp>

#include "namekit/splitter.hpp"

namespace namekit {

const char* context_name(ContextKind kind) {
    switch (kind) {
        case ContextKind::Internal: return "internal";
        case ContextKind::Interaction: return "interaction";
        case ContextKind::Sibling: return "sibling";
        case ContextKind::Enclosing: return "enclosing";
    }
    return "?";
}

const char* mode_name(Mode mode) {
    return mode == Mode::Checking ? "checking" : "suggestion";
}

TokenSeq pad_truncate(TokenSeq seq, std::size_t l_max) {
    seq.true_length = std::min(seq.true_length, l_max);
    seq.tokens.resize(seq.true_length);
    while (seq.tokens.size() < l_max) seq.tokens.push_back(kPadToken);
    return seq;
}

const TokenSeq& ContextBundle::get(ContextKind kind) const {
    switch (kind) {
        case ContextKind::Internal: return internal;
        case ContextKind::Interaction: return interaction;
        case ContextKind::Sibling: return sibling;
        case ContextKind::Enclosing: return enclosing;
    }
    return internal;
}

namespace {

void append_split(std::vector<std::string>& sink, const std::string& identifier) {
    for (auto& piece : split_identifier(identifier)) sink.push_back(std::move(piece));
}

std::vector<std::string> internal_tokens(const MethodRecord& m) {
    std::vector<std::string> out;
    for (const auto& tok : m.body_tokens) append_split(out, tok);
    for (const auto& [type, name] : m.params) {
        append_split(out, type);
        append_split(out, name);
    }
    if (m.return_type != "void") append_split(out, m.return_type);
    return out;
}

TokenSeq to_seq(std::vector<std::string> tokens) {
    TokenSeq seq;
    seq.true_length = tokens.size();
    seq.tokens = std::move(tokens);
    return seq;
}

}  // namespace

TokenSeq ContextBuilder::internal(const MethodRecord& m) const {
    return to_seq(internal_tokens(m));
}

TokenSeq ContextBuilder::interaction(const MethodRecord& m, Mode mode) const {
    std::vector<std::string> out;
    auto append_entry = [&](const std::string& neighbor_id) {
        const MethodRecord* n = corpus_.find_method(neighbor_id);
        if (!n) return;
        for (const auto& tok : n->name_subtokens) out.push_back(tok);
        auto internal = internal_tokens(*n);
        out.insert(out.end(), internal.begin(), internal.end());
    };
    for (const auto& callee : graph_.callees_of(m.id)) append_entry(callee);
    if (mode == Mode::Checking) {
        for (const auto& caller : graph_.callers_of(m.id)) append_entry(caller);
    }
    return to_seq(std::move(out));
}

TokenSeq ContextBuilder::sibling(const MethodRecord& m) const {
    std::vector<std::string> out;
    const ClassRecord* cls = corpus_.find_class(m.class_id);
    if (cls) {
        for (const auto& sibling_id : cls->method_ids) {
            if (sibling_id == m.id) continue;  // the name-exclusion filter
            const MethodRecord* s = corpus_.find_method(sibling_id);
            if (!s) continue;
            for (const auto& tok : s->name_subtokens) out.push_back(tok);
            auto internal = internal_tokens(*s);
            out.insert(out.end(), internal.begin(), internal.end());
        }
    }
    return to_seq(std::move(out));
}

TokenSeq ContextBuilder::enclosing(const MethodRecord& m) const {
    std::vector<std::string> out;
    const ClassRecord* cls = corpus_.find_class(m.class_id);
    if (cls) {
        append_split(out, cls->name);
        for (const auto& entity : cls->entity_names) append_split(out, entity);
    }
    return to_seq(std::move(out));
}

ContextBundle ContextBuilder::bundle(const MethodRecord& m, Mode mode,
                                     std::size_t l_max) const {
    ContextBundle b;
    b.method_id = m.id;
    b.mode = mode;
    b.internal = pad_truncate(internal(m), l_max);
    b.interaction = pad_truncate(interaction(m, mode), l_max);
    b.sibling = pad_truncate(sibling(m), l_max);
    b.enclosing = pad_truncate(enclosing(m), l_max);
    return b;
}

std::string bundle_to_json(const ContextBundle& bundle) {
    nlohmann::ordered_json j;
    j["method_id"] = bundle.method_id;
    j["mode"] = mode_name(bundle.mode);
    for (ContextKind kind : {ContextKind::Internal, ContextKind::Interaction,
                             ContextKind::Sibling, ContextKind::Enclosing}) {
        const TokenSeq& seq = bundle.get(kind);
        nlohmann::ordered_json entry;
        entry["tokens"] = seq.tokens;
        entry["true_length"] = seq.true_length;
        j[context_name(kind)] = entry;
    }
    return j.dump();
}

}  // namespace namekit
