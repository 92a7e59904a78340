#pragma once

// Thin wrappers over ICU for the handful of Unicode services the toolkit
// needs: NFC normalization, UTF-8 validation, code point classification and
// case mapping.

#include <string>
#include <string_view>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include "cmforge/error.hpp"

namespace cmforge::unicode {

inline bool valid_utf8(std::string_view s)
{
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    int32_t i = 0;
    const auto n = static_cast<int32_t>(s.size());
    while (i < n) {
        UChar32 c;
        U8_NEXT(p, i, n, c);
        if (c < 0) return false;
    }
    return true;
}

inline std::vector<UChar32> code_points(std::string_view s)
{
    std::vector<UChar32> out;
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    int32_t i = 0;
    const auto n = static_cast<int32_t>(s.size());
    while (i < n) {
        UChar32 c;
        U8_NEXT(p, i, n, c);
        out.push_back(c < 0 ? 0xFFFD : c);
    }
    return out;
}

inline void append_utf8(std::string& out, UChar32 c)
{
    uint8_t buf[4];
    int32_t len = 0;
    UBool err = false;
    U8_APPEND(buf, len, 4, c, err);
    if (!err) out.append(reinterpret_cast<const char*>(buf), static_cast<size_t>(len));
}

inline std::string nfc(std::string_view s)
{
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
    auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    if (norm->isNormalized(src, status) && U_SUCCESS(status)) return std::string(s);
    status = U_ZERO_ERROR;
    icu::UnicodeString dst = norm->normalize(src, status);
    if (U_FAILURE(status)) throw input_error("NFC normalization failed");
    std::string out;
    dst.toUTF8String(out);
    return out;
}

inline std::string to_lower(std::string_view s)
{
    auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    u.toLower(icu::Locale::getRoot());
    std::string out;
    u.toUTF8String(out);
    return out;
}

/// Uppercases the first code point, leaves the rest untouched.
inline std::string capitalize_first(std::string_view s)
{
    if (s.empty()) return {};
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    int32_t i = 0;
    UChar32 c;
    U8_NEXT(p, i, static_cast<int32_t>(s.size()), c);
    if (c < 0) return std::string(s);
    std::string out;
    append_utf8(out, u_toupper(c));
    out.append(s.substr(static_cast<size_t>(i)));
    return out;
}

inline bool starts_upper(std::string_view s)
{
    if (s.empty()) return false;
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    int32_t i = 0;
    UChar32 c;
    U8_NEXT(p, i, static_cast<int32_t>(s.size()), c);
    return c >= 0 && u_isupper(c);
}

inline bool starts_lower(std::string_view s)
{
    if (s.empty()) return false;
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    int32_t i = 0;
    UChar32 c;
    U8_NEXT(p, i, static_cast<int32_t>(s.size()), c);
    return c >= 0 && u_islower(c);
}

/// General category P*.
inline bool is_punct(UChar32 c) { return u_ispunct(c) != 0; }

inline bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

inline bool all_punct(std::string_view s)
{
    if (s.empty()) return false;
    for (UChar32 c : code_points(s))
        if (!is_punct(c)) return false;
    return true;
}

enum class Script { none, latin, devanagari, other };

/// Script of the first letter in `s`; `none` when it has no letters.
inline Script letter_script(std::string_view s)
{
    for (UChar32 c : code_points(s)) {
        if (!u_isalpha(c) && u_charType(c) != U_NON_SPACING_MARK &&
            u_charType(c) != U_COMBINING_SPACING_MARK)
            continue;
        UErrorCode status = U_ZERO_ERROR;
        UScriptCode sc = uscript_getScript(c, &status);
        if (U_FAILURE(status)) continue;
        if (sc == USCRIPT_COMMON || sc == USCRIPT_INHERITED) continue;
        if (sc == USCRIPT_LATIN) return Script::latin;
        if (sc == USCRIPT_DEVANAGARI) return Script::devanagari;
        return Script::other;
    }
    return Script::none;
}

}  // namespace cmforge::unicode
