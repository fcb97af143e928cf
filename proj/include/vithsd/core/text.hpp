#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vithsd {

/// Token substituted for URL substrings by preprocess_text.
inline constexpr std::string_view kUrlToken = "<url>";

/// Canonical text normalization applied before classification:
///  1. NFC composition, lowercasing (then NFC again)
///  2. whitespace characters become spaces, other control characters are removed
///  3. URL substrings (http://, https://, www.) become `<url>`
///  4. runs of one code point longer than 3 are cut to 3
///  5. whitespace runs collapse to a single space, ends trimmed
/// Steps 3-5 repeat until the string is stable, so the function is idempotent.
/// Emoji and emoticons pass through untouched.
std::string preprocess_text(std::string_view raw);

/// Statistics tokenizer: punctuation code points become standalone tokens,
/// then the text is split on whitespace.
std::vector<std::string> tokenize(std::string_view text);

/// Byte offsets of every code point start in a UTF-8 string, plus a final
/// entry equal to text.size(). Invalid lead bytes are treated as single bytes.
std::vector<std::size_t> code_point_offsets(std::string_view text);

}  // namespace vithsd
