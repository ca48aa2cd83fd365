#include <doctest.h>

#include "fnd/features.hpp"
#include "fnd/unicode.hpp"

using namespace fnd;

TEST_CASE("utf8 round trip") {
  std::string s = "abc ሰበር ዜና éḍ";
  CHECK(utf8_encode(utf8_decode(s)) == s);
}

TEST_CASE("utf8 invalid bytes become replacement chars") {
  std::string bad = "a\xC3(";  // truncated 2-byte sequence
  auto cps = utf8_decode(bad);
  REQUIRE(cps.size() == 3);
  CHECK(cps[1] == 0xFFFD);
}

// Expected sequences verified against a reference Unicode implementation.
TEST_CASE("nfc composes and reorders canonically") {
  CHECK(nfc(std::string("é")) == "é");
  CHECK(nfc(std::string("é")) == "é");
  // A + dot-below + acute: dot composes, acute stays combining.
  CHECK(nfc(std::string("Ạ́")) == "Ạ́");
  // Marks out of canonical order are reordered before composing.
  CHECK(nfc(std::string("ạ́")) == "ạ́");
  // Angstrom sign is a singleton decomposition to A-with-ring.
  CHECK(nfc(std::string("Å")) == "Å");
  // d + dot-above precomposed, then dot-below must swap in under it.
  CHECK(nfc(std::string("ḍ̇")) == "ḍ̇");
  CHECK(nfc(std::string("ḍ̇")) == "ḍ̇");
  CHECK(nfc(std::string("ĕ̀")) == "ĕ̀");
}

TEST_CASE("nfc handles hangul jamo algorithmically") {
  CHECK(nfc(std::string("가")) == "가");
  CHECK(nfc(std::string("각")) == "각");
}

TEST_CASE("nfc leaves ethiopic untouched") {
  std::string am = "ሰበር ዜና ነው";
  CHECK(nfc(am) == am);
}

TEST_CASE("tokenize splits on whitespace") {
  auto t = tokenize("ሰበር ዜና ነው");
  REQUIRE(t.size() == 3);
  CHECK(t[0] == "ሰበር");
  CHECK(t[1] == "ዜና");
  CHECK(t[2] == "ነው");
}

TEST_CASE("tokenize empty input") { CHECK(tokenize("").empty()); }

TEST_CASE("tokenize strips edge punctuation") {
  auto t = tokenize("ዜና!!!");
  REQUIRE(t.size() == 1);
  CHECK(t[0] == "ዜና");
  // Ethiopic full stop and comma are punctuation too.
  auto t2 = tokenize("ዜና። ሰበር፣");
  REQUIRE(t2.size() == 2);
  CHECK(t2[0] == "ዜና");
  CHECK(t2[1] == "ሰበር");
}

TEST_CASE("tokenize lowercases latin only") {
  auto t = tokenize("Breaking NEWS État ሰበር");
  REQUIRE(t.size() == 4);
  CHECK(t[0] == "breaking");
  CHECK(t[1] == "news");
  CHECK(t[2] == "état");
  CHECK(t[3] == "ሰበር");
}

TEST_CASE("tokenize drops pure-punctuation tokens") {
  auto t = tokenize("... ዜና --- !?");
  REQUIRE(t.size() == 1);
  CHECK(t[0] == "ዜና");
}

TEST_CASE("tokenize handles unicode whitespace variants") {
  auto t = tokenize(std::string("a b c\td"));
  REQUIRE(t.size() == 4);
}
