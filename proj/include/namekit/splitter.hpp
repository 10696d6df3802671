#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace namekit {

// Splits a Java identifier into lowercase sub-tokens.
//
// Rules, applied in order:
//   1. A leading Hungarian-style prefix (str, b, c, f, g, i, m, n, p, s) is
//      stripped when the character after it is uppercase: mOwner -> owner,
//      strName -> name. Longest prefix wins; the prefix must sit at the very
//      start of the identifier.
//   2. Boundaries fall between a lowercase letter and the uppercase letter
//      after it, and before the last capital of an acronym run that is
//      followed by lowercase: parseHTTPResponse -> parse, http, response.
//   3. Digits, underscores and any other non-letter characters separate
//      pieces and are themselves discarded.
//   4. Pieces shorter than two characters are dropped.
std::vector<std::string> split_identifier(std::string_view identifier);

// Joins sub-tokens back into a camelCase identifier: [get, size] -> getSize.
std::string recompose_camel(const std::vector<std::string>& subtokens);

}  // namespace namekit
