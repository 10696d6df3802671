#include "namekit/splitter.hpp"

#include <array>
#include <cctype>

namespace namekit {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_letter(char c) { return is_upper(c) || is_lower(c); }
char to_lower(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

// Longest first so "strName" sheds "str" rather than "s".
constexpr std::array<std::string_view, 10> kHungarianPrefixes = {
    "str", "b", "c", "f", "g", "i", "m", "n", "p", "s"};

std::size_t hungarian_offset(std::string_view id) {
    for (std::string_view prefix : kHungarianPrefixes) {
        if (id.size() > prefix.size() && id.substr(0, prefix.size()) == prefix &&
            is_upper(id[prefix.size()])) {
            return prefix.size();
        }
    }
    return 0;
}

}  // namespace

std::vector<std::string> split_identifier(std::string_view identifier) {
    std::vector<std::string> pieces;
    std::string current;
    auto flush = [&] {
        if (current.size() >= 2) pieces.push_back(current);
        current.clear();
    };

    std::size_t start = hungarian_offset(identifier);
    for (std::size_t i = start; i < identifier.size(); ++i) {
        char c = identifier[i];
        if (!is_letter(c)) {
            flush();
            continue;
        }
        if (!current.empty() && is_upper(c)) {
            char prev = identifier[i - 1];
            bool next_lower = i + 1 < identifier.size() && is_lower(identifier[i + 1]);
            // lower|Upper always breaks; inside an acronym run the break sits
            // before the capital that starts the next word (HTTPResponse).
            if (is_lower(prev) || (is_upper(prev) && next_lower)) flush();
        }
        current.push_back(to_lower(c));
    }
    flush();
    return pieces;
}

std::string recompose_camel(const std::vector<std::string>& subtokens) {
    std::string out;
    for (std::size_t i = 0; i < subtokens.size(); ++i) {
        const std::string& tok = subtokens[i];
        if (tok.empty()) continue;
        if (i == 0 || out.empty()) {
            out += tok;
        } else {
            out += static_cast<char>(std::toupper(static_cast<unsigned char>(tok[0])));
            out += tok.substr(1);
        }
    }
    return out;
}

}  // namespace namekit
