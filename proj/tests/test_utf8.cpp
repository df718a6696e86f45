#include <string>

#include "doctest.h"
#include "qawa/utf8.hpp"

using namespace qawa;

TEST_CASE("utf8 decode and encode round trip") {
    const std::string samples[] = {"", "kan", "p'unchay", "ñawi",
                                   "áéíóúü",
                                   "wawqiykunata watukurqani"};
    for (const auto& s : samples) {
        CHECK(utf8::encode(utf8::decode(s)) == s);
    }
}

TEST_CASE("utf8 length counts codepoints") {
    CHECK(utf8::length("") == 0);
    CHECK(utf8::length("kan") == 3);
    CHECK(utf8::length("p'unchay") == 8);
    CHECK(utf8::length("ñawi") == 4);      // 5 bytes
    CHECK(utf8::length("a’b") == 3);       // curly apostrophe, 3 bytes
}

TEST_CASE("utf8 invalid bytes pass through one at a time") {
    std::string bad;
    bad.push_back(static_cast<char>(0xff));
    auto cps = utf8::decode(bad);
    REQUIRE(cps.size() == 1);
    CHECK(cps[0] == 0xffu);

    // Truncated two-byte sequence at end of string.
    std::string trunc = "a";
    trunc.push_back(static_cast<char>(0xc3));
    cps = utf8::decode(trunc);
    REQUIRE(cps.size() == 2);
    CHECK(cps[0] == 'a');
    CHECK(cps[1] == 0xc3u);

    // Lead byte followed by a non-continuation byte.
    std::string mixed;
    mixed.push_back(static_cast<char>(0xc3));
    mixed.push_back('x');
    cps = utf8::decode(mixed);
    REQUIRE(cps.size() == 2);
    CHECK(cps[0] == 0xc3u);
    CHECK(cps[1] == 'x');
}

TEST_CASE("utf8 case folding covers ascii and latin-1 letters") {
    CHECK(utf8::to_lower('A') == 'a');
    CHECK(utf8::to_lower('Z') == 'z');
    CHECK(utf8::to_lower('a') == 'a');
    CHECK(utf8::to_lower(U'Á') == U'á');  // A acute
    CHECK(utf8::to_lower(U'Ñ') == U'ñ');  // N tilde
    CHECK(utf8::to_lower(U'Ü') == U'ü');  // U diaeresis
    CHECK(utf8::to_lower(U'×') == U'×');  // multiplication sign unchanged
    CHECK(utf8::to_lower('9') == '9');
}

TEST_CASE("utf8 character classes") {
    CHECK(utf8::is_space(' '));
    CHECK(utf8::is_space('\t'));
    CHECK(utf8::is_space(0xa0));
    CHECK_FALSE(utf8::is_space('a'));

    CHECK(utf8::is_apostrophe('\''));
    CHECK(utf8::is_apostrophe(0x2019));
    CHECK(utf8::is_apostrophe(0x02bc));
    CHECK(utf8::is_apostrophe('`'));
    CHECK_FALSE(utf8::is_apostrophe('a'));

    CHECK(utf8::is_ext_punct(0xbf));    // inverted question mark
    CHECK(utf8::is_ext_punct(0xab));    // left guillemet
    CHECK(utf8::is_ext_punct(0x2026));  // ellipsis
    CHECK_FALSE(utf8::is_ext_punct('?'));

    CHECK(utf8::is_word_char('a'));
    CHECK(utf8::is_word_char('7'));
    CHECK(utf8::is_word_char(U'ñ'));
    CHECK_FALSE(utf8::is_word_char('.'));
    CHECK_FALSE(utf8::is_word_char('?'));
    CHECK_FALSE(utf8::is_word_char(0xbf));
    CHECK_FALSE(utf8::is_word_char(0x2019));
    CHECK_FALSE(utf8::is_word_char(' '));
}
