#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fnd {

// UTF-8 <-> code point conversion. Malformed byte sequences decode to
// U+FFFD rather than throwing; corpus JSON is validated upstream so this
// only matters for raw text fed in through other paths.
std::vector<char32_t> utf8_decode(std::string_view s);
std::string utf8_encode(const std::vector<char32_t>& cps);
void utf8_append(std::string& out, char32_t cp);

// Canonical composition (NFC). Hangul is handled algorithmically, the rest
// via tables generated from the Unicode character database.
std::string nfc(std::string_view s);
std::vector<char32_t> nfc(const std::vector<char32_t>& cps);

bool is_white_space(char32_t cp);
bool is_punctuation(char32_t cp);

// Simple lowercase for the Latin blocks (U+0041..U+024F). Ethiopic has no
// case, so everything else passes through unchanged.
char32_t latin_to_lower(char32_t cp);

}  // namespace fnd
