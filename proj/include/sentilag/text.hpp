#pragma once

#include <string>
#include <string_view>

namespace sentilag::text {

/// Drops malformed UTF-8 (including encoded surrogates), strips control
/// characters, collapses runs of Unicode whitespace to one ASCII space, trims,
/// and applies NFC. Idempotent.
std::string clean(std::string_view raw);

/// NFC followed by full Unicode case folding; used for every keyword match.
std::string fold(std::string_view s);

/// Case-insensitive substring test on folded forms.
bool contains_folded(std::string_view haystack, std::string_view needle);

/// Code points of a UTF-8 string; malformed bytes are skipped.
std::u32string decode(std::string_view s);

std::string encode(std::u32string_view cps);

bool is_valid_utf8(std::string_view s);

}  // namespace sentilag::text
