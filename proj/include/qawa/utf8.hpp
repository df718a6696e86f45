#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qawa::utf8 {

// Minimal UTF-8 handling for the Latin repertoire this toolkit deals with
// (ASCII plus Latin-1 supplement letters and a few typographic marks).
// Invalid byte sequences are passed through one byte at a time.

inline std::vector<uint32_t> decode(std::string_view s) {
    std::vector<uint32_t> out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        uint32_t cp = b0;
        size_t len = 1;
        if (b0 >= 0xf0)
            len = 4, cp = b0 & 0x07u;
        else if (b0 >= 0xe0)
            len = 3, cp = b0 & 0x0fu;
        else if (b0 >= 0xc0)
            len = 2, cp = b0 & 0x1fu;
        if (len > 1) {
            if (i + len > s.size()) {
                out.push_back(b0);
                ++i;
                continue;
            }
            bool ok = true;
            for (size_t k = 1; k < len; ++k) {
                const auto b = static_cast<unsigned char>(s[i + k]);
                if ((b & 0xc0u) != 0x80u) {
                    ok = false;
                    break;
                }
                cp = (cp << 6) | (b & 0x3fu);
            }
            if (!ok) {
                out.push_back(b0);
                ++i;
                continue;
            }
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline void append(std::string& s, uint32_t cp) {
    if (cp < 0x80) {
        s.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        s.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        s.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        s.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        s.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        s.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

inline std::string encode(const std::vector<uint32_t>& cps) {
    std::string s;
    s.reserve(cps.size());
    for (uint32_t cp : cps) append(s, cp);
    return s;
}

inline size_t length(std::string_view s) { return decode(s).size(); }

// ASCII plus Latin-1 supplement case folding (covers the Spanish alphabet
// with accents and diaeresis).
inline uint32_t to_lower(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xc0 && cp <= 0xde && cp != 0xd7) return cp + 0x20;
    return cp;
}

inline bool is_space(uint32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
           cp == '\v' || cp == 0xa0;
}

inline bool is_ascii_alnum(uint32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z');
}

inline bool is_apostrophe(uint32_t cp) {
    return cp == '\'' || cp == 0x2019 /* ' */ || cp == 0x02bc /* ʼ */ ||
           cp == '`' || cp == 0xb4 /* ´ */;
}

// Typographic punctuation outside ASCII that the tokenizer must not treat
// as a word character.
inline bool is_ext_punct(uint32_t cp) {
    switch (cp) {
        case 0xa1:    // ¡
        case 0xbf:    // ¿
        case 0xab:    // «
        case 0xbb:    // »
        case 0x2013:  // –
        case 0x2014:  // —
        case 0x2018:  // '
        case 0x201c:  // "
        case 0x201d:  // "
        case 0x2026:  // …
            return true;
        default:
            return false;
    }
}

// Word characters: alphanumerics of the Latin repertoire. Anything at or
// above U+00C0 is a letter for our purposes except the marks listed above.
inline bool is_word_char(uint32_t cp) {
    if (is_ascii_alnum(cp)) return true;
    if (cp < 0x80) return false;
    return !is_space(cp) && !is_ext_punct(cp) && !is_apostrophe(cp);
}

}  // namespace qawa::utf8
