#include "vithsd/core/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <string>

namespace vithsd {

namespace {

std::u32string to_u32(const icu::UnicodeString& us) {
    std::u32string out;
    out.reserve(static_cast<std::size_t>(us.length()));
    for (int32_t i = 0; i < us.length();) {
        const UChar32 c = us.char32At(i);
        out.push_back(static_cast<char32_t>(c));
        i = us.moveIndex32(i, 1);
    }
    return out;
}

void append_utf8(std::string& out, char32_t c) {
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
}

std::string to_utf8(const std::u32string& s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t c : s) append_utf8(out, c);
    return out;
}

icu::UnicodeString nfc(const icu::UnicodeString& us) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) return us;
    icu::UnicodeString out = norm->normalize(us, status);
    return U_FAILURE(status) ? us : out;
}

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0; }

bool is_word_char(char32_t c) { return u_isalnum(static_cast<UChar32>(c)) != 0; }

bool starts_with_at(const std::u32string& s, std::size_t pos, std::u32string_view prefix) {
    return s.compare(pos, prefix.size(), prefix) == 0;
}

std::u32string replace_urls(const std::u32string& s) {
    static constexpr std::u32string_view kHttp = U"http://";
    static constexpr std::u32string_view kHttps = U"https://";
    static constexpr std::u32string_view kWww = U"www.";
    static const std::u32string kToken = U"<url>";

    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const bool boundary = i == 0 || !is_word_char(s[i - 1]);
        std::size_t prefix = 0;
        if (boundary) {
            if (starts_with_at(s, i, kHttps)) prefix = kHttps.size();
            else if (starts_with_at(s, i, kHttp)) prefix = kHttp.size();
            else if (starts_with_at(s, i, kWww)) prefix = kWww.size();
        }
        if (prefix > 0 && i + prefix < s.size() && !is_space(s[i + prefix])) {
            std::size_t end = i + prefix;
            while (end < s.size() && !is_space(s[end])) ++end;
            out += kToken;
            i = end;
        } else {
            out.push_back(s[i]);
            ++i;
        }
    }
    return out;
}

std::u32string collapse_runs(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t run = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        run = (i > 0 && s[i] == s[i - 1]) ? run + 1 : 1;
        if (run <= 3) out.push_back(s[i]);
    }
    return out;
}

std::u32string collapse_whitespace(const std::u32string& s) {
    std::u32string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char32_t c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(U' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string preprocess_text(std::string_view raw) {
    if (raw.empty()) return {};
    icu::UnicodeString us = icu::UnicodeString::fromUTF8(
        icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    us = nfc(us);
    us.toLower(icu::Locale::getRoot());
    us = nfc(us);

    std::u32string text;
    for (char32_t c : to_u32(us)) {
        if (is_space(c)) {
            text.push_back(U' ');
        } else if (u_charType(static_cast<UChar32>(c)) == U_CONTROL_CHAR) {
            continue;
        } else {
            text.push_back(c);
        }
    }

    // Run-collapsing can expose a new URL prefix ("wwwww." -> "www."), so
    // iterate to a fixed point. Each pass never grows the string.
    for (int pass = 0; pass < 16; ++pass) {
        std::u32string next = collapse_whitespace(collapse_runs(replace_urls(text)));
        if (next == text) break;
        text = std::move(next);
    }
    return to_utf8(text);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    if (text.empty()) return tokens;
    const icu::UnicodeString us = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    std::string current;
    auto flush = [&] {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
    };
    for (char32_t c : to_u32(us)) {
        if (is_space(c)) {
            flush();
        } else if (u_ispunct(static_cast<UChar32>(c))) {
            flush();
            std::string p;
            append_utf8(p, c);
            tokens.push_back(std::move(p));
        } else {
            append_utf8(current, c);
        }
    }
    flush();
    return tokens;
}

std::vector<std::size_t> code_point_offsets(std::string_view text) {
    std::vector<std::size_t> offsets;
    offsets.reserve(text.size() + 1);
    std::size_t i = 0;
    while (i < text.size()) {
        offsets.push_back(i);
        const auto lead = static_cast<unsigned char>(text[i]);
        std::size_t width = 1;
        if (lead >= 0xF0 && lead < 0xF8) width = 4;
        else if (lead >= 0xE0) width = 3;
        else if (lead >= 0xC0) width = 2;
        if (lead >= 0xF8) width = 1;
        i = std::min(text.size(), i + width);
    }
    offsets.push_back(text.size());
    return offsets;
}

}  // namespace vithsd
