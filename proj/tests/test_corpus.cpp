#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

#include "fnd/corpus.hpp"
#include "fnd/errors.hpp"
#include "helpers.hpp"

using namespace fnd;

namespace {

const char* kLine =
    R"({"id":"a1","domain":"politics","label":1,"content":{"headline":"h","text":"ሰበር ዜና"},"publisher":{"user_name":"u","sex":"male","age":30},"engagements":[{"user_id":"u1","post_id":"p1","timestamp":5}]})";

}  // namespace

TEST_CASE("load_corpus parses a line") {
  std::istringstream in(kLine);
  Corpus c = parse_corpus(in, "mem");
  REQUIRE(c.size() == 1);
  const NewsArticle& a = c.articles[0];
  CHECK(a.id == "a1");
  CHECK(a.domain == Domain::kPolitics);
  CHECK(a.label == Label::kFake);
  CHECK(a.publisher.age == 30);
  REQUIRE(a.engagements.size() == 1);
  CHECK(a.engagements[0].timestamp == 5);
}

TEST_CASE("load_corpus rejects duplicate ids") {
  std::istringstream in(std::string(kLine) + "\n" + kLine + "\n");
  CHECK_THROWS_AS(parse_corpus(in, "mem"), ValidationError);
}

TEST_CASE("load_corpus reports the malformed line number") {
  std::istringstream in(std::string(kLine) + "\n{not json\n");
  try {
    parse_corpus(in, "mem");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("mem:2") != std::string::npos);
  }
}

TEST_CASE("load_corpus rejects unknown domains") {
  std::string line = kLine;
  line.replace(line.find("politics"), 8, "gossip!!");
  std::istringstream in(line);
  CHECK_THROWS_AS(parse_corpus(in, "mem"), ValidationError);
}

TEST_CASE("null timestamp becomes absent") {
  std::string line = kLine;
  line.replace(line.find("\"timestamp\":5"), 13, "\"timestamp\":null");
  std::istringstream in(line);
  Corpus c = parse_corpus(in, "mem");
  CHECK_FALSE(c.articles[0].engagements[0].timestamp.has_value());
}

TEST_CASE("unknown json keys are ignored") {
  std::string line = kLine;
  line.insert(1, "\"extra_key\":[1,2,3],");
  std::istringstream in(line);
  CHECK(parse_corpus(in, "mem").size() == 1);
}

TEST_CASE("engagements are sorted with absent timestamps last") {
  std::string line =
      R"({"id":"a1","domain":"sport","label":0,"content":{"headline":"","text":"x"},"publisher":{"user_name":"u","sex":"unknown","age":null},"engagements":[{"user_id":"u1","post_id":"p1","timestamp":null},{"user_id":"u2","post_id":"p2","timestamp":9},{"user_id":"u3","post_id":"p3","timestamp":2}]})";
  std::istringstream in(line);
  Corpus c = parse_corpus(in, "mem");
  const auto& es = c.articles[0].engagements;
  REQUIRE(es.size() == 3);
  CHECK(es[0].timestamp == 2);
  CHECK(es[1].timestamp == 9);
  CHECK_FALSE(es[2].timestamp.has_value());
}

TEST_CASE("write/load round trip is byte-identical") {
  GenConfig cfg;
  cfg.n_articles = 60;
  cfg.seed = 11;
  Corpus c = generate_synthetic(cfg);
  std::string once = corpus_to_jsonl(c);
  std::istringstream in(once);
  Corpus re = parse_corpus(in, c.name);
  re.name = c.name;
  CHECK(corpus_to_jsonl(re) == once);
}

TEST_CASE("split fractions and determinism") {
  GenConfig cfg;
  cfg.n_articles = 200;
  cfg.seed = 3;
  Corpus c = generate_synthetic(cfg);

  auto [train, test] = split(c, 0.8, 42);
  CHECK(train.size() == 160);
  CHECK(test.size() == 40);

  // Partition: disjoint and exhaustive.
  std::set<std::string> ids;
  for (const auto& a : train.articles) ids.insert(a.id);
  for (const auto& a : test.articles) CHECK(ids.insert(a.id).second);
  CHECK(ids.size() == c.size());

  auto [train2, test2] = split(c, 0.8, 42);
  CHECK(corpus_to_jsonl(train2) == corpus_to_jsonl(train));
  CHECK(corpus_to_jsonl(test2) == corpus_to_jsonl(test));

  auto [train3, _] = split(c, 0.8, 43);
  CHECK(corpus_to_jsonl(train3) != corpus_to_jsonl(train));
}

TEST_CASE("split stratifies four balanced articles") {
  Corpus c = test::make_corpus({
      test::make_article("a", "x", 0),
      test::make_article("b", "x", 1),
      test::make_article("c", "x", 0),
      test::make_article("d", "x", 1),
  });
  auto [train, test_] = split(c, 0.5, 7);
  REQUIRE(train.size() == 2);
  REQUIRE(test_.size() == 2);
  auto count_fake = [](const Corpus& s) {
    int n = 0;
    for (const auto& a : s.articles) n += *a.label == Label::kFake;
    return n;
  };
  CHECK(count_fake(train) == 1);
  CHECK(count_fake(test_) == 1);
}

TEST_CASE("split rejects bad fractions") {
  GenConfig cfg;
  cfg.n_articles = 10;
  Corpus c = generate_synthetic(cfg);
  CHECK_THROWS_AS(split(c, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(split(c, 1.0, 1), ArgumentError);
}

TEST_CASE("generator honors counts and balance") {
  GenConfig cfg;
  cfg.n_articles = 100;
  cfg.fake_fraction = 0.5;
  cfg.seed = 1;
  Corpus c = generate_synthetic(cfg);
  REQUIRE(c.size() == 100);
  int fake = 0;
  for (const auto& a : c.articles) fake += *a.label == Label::kFake;
  CHECK(fake == 50);
}

TEST_CASE("generator is deterministic and seed-sensitive") {
  GenConfig cfg;
  cfg.n_articles = 80;
  cfg.seed = 9;
  CHECK(corpus_to_jsonl(generate_synthetic(cfg)) ==
        corpus_to_jsonl(generate_synthetic(cfg)));
  GenConfig other = cfg;
  other.seed = 10;
  CHECK(corpus_to_jsonl(generate_synthetic(other)) !=
        corpus_to_jsonl(generate_synthetic(cfg)));
}

TEST_CASE("generator domain proportions follow the reference ratios") {
  GenConfig cfg;
  cfg.n_articles = 12000;
  cfg.seed = 5;
  Corpus c = generate_synthetic(cfg);
  std::map<Domain, int> count;
  for (const auto& a : c.articles) count[a.domain] += 1;
  CHECK(count[Domain::kPolitics] == 4003);
  CHECK(count[Domain::kReligion] == 2960);
  CHECK(count[Domain::kBusiness] == 2112);
  CHECK(count[Domain::kSport] == 1285);
  CHECK(count[Domain::kHealth] == 967);
  CHECK(count[Domain::kTechnology] == 673);

  // 80/20 of the full-size corpus.
  auto [train, test] = split(c, 0.8, 1);
  CHECK(train.size() == 9600);
  CHECK(test.size() == 2400);
}

TEST_CASE("generator validates every article") {
  GenConfig cfg;
  cfg.n_articles = 300;
  cfg.seed = 21;
  Corpus c = generate_synthetic(cfg);
  for (const auto& a : c.articles) validate_article(a, a.id);  // must not throw
}

TEST_CASE("signal zero plants no markers") {
  GenConfig cfg;
  cfg.n_articles = 400;
  cfg.signal_strength = 0.0;
  cfg.seed = 2;
  Corpus c = generate_synthetic(cfg);
  auto markers = planted_marker_tokens(cfg);
  for (const auto& a : c.articles) {
    for (const auto& m : markers)
      CHECK(a.content.text.find(m) == std::string::npos);
  }
}

TEST_CASE("full signal plants a marker in every fake article") {
  GenConfig cfg;
  cfg.n_articles = 200;
  cfg.signal_strength = 1.0;
  cfg.seed = 4;
  Corpus c = generate_synthetic(cfg);
  auto markers = planted_marker_tokens(cfg);
  for (const auto& a : c.articles) {
    bool has = false;
    for (const auto& m : markers)
      has = has || a.content.text.find(m) != std::string::npos;
    if (*a.label == Label::kFake)
      CHECK(has);
    else
      CHECK_FALSE(has);
  }
}

TEST_CASE("publisher age outside the valid range is rejected") {
  std::string line = kLine;
  line.replace(line.find("\"age\":30"), 8, "\"age\":200");
  std::istringstream in(line);
  CHECK_THROWS_AS(parse_corpus(in, "mem"), ValidationError);
}

TEST_CASE("degenerate generator configs are rejected") {
  GenConfig cfg;
  cfg.n_articles = 4;
  cfg.fake_fraction = 0.1;  // 0.4 expected fakes
  CHECK_THROWS_AS(generate_synthetic(cfg), ArgumentError);
  cfg.n_articles = 2;
  cfg.fake_fraction = 0.5;
  CHECK_THROWS_AS(generate_synthetic(cfg), ArgumentError);
}
