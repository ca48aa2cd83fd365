#include "fnd/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fnd/errors.hpp"
#include "fnd/rng.hpp"
#include "fnd/unicode.hpp"

namespace fnd {

using ordered_json = nlohmann::ordered_json;

const char* to_string(Sex s) {
  switch (s) {
    case Sex::kMale:
      return "male";
    case Sex::kFemale:
      return "female";
    default:
      return "unknown";
  }
}

const char* to_string(Domain d) {
  switch (d) {
    case Domain::kBusiness:
      return "business";
    case Domain::kHealth:
      return "health";
    case Domain::kPolitics:
      return "politics";
    case Domain::kSport:
      return "sport";
    case Domain::kReligion:
      return "religion";
    default:
      return "technology";
  }
}

Sex sex_from_string(const std::string& s) {
  if (s == "male") return Sex::kMale;
  if (s == "female") return Sex::kFemale;
  if (s == "unknown") return Sex::kUnknown;
  throw ValidationError("unknown sex value: \"" + s + "\"");
}

Domain domain_from_string(const std::string& s) {
  if (s == "business") return Domain::kBusiness;
  if (s == "health") return Domain::kHealth;
  if (s == "politics") return Domain::kPolitics;
  if (s == "sport") return Domain::kSport;
  if (s == "religion") return Domain::kReligion;
  if (s == "technology") return Domain::kTechnology;
  throw ValidationError("unknown domain: \"" + s + "\"");
}

void validate_article(const NewsArticle& a, const std::string& where) {
  auto fail = [&](const std::string& msg) {
    throw ValidationError(where + ": " + msg);
  };
  if (a.id.empty()) fail("article id is empty");
  if (a.publisher.user_name.empty()) fail("publisher user_name is empty");
  if (a.publisher.age && (*a.publisher.age < 0 || *a.publisher.age > 150))
    fail("publisher age out of [0, 150]");
  if (a.content.text.empty()) fail("content text is empty");
  for (const Engagement& e : a.engagements) {
    if (e.user_id.empty()) fail("engagement user_id is empty");
    if (e.post_id.empty()) fail("engagement post_id is empty");
    if (e.timestamp && *e.timestamp < 0) fail("negative engagement timestamp");
  }
  for (std::size_t i = 1; i < a.engagements.size(); ++i) {
    const auto& prev = a.engagements[i - 1].timestamp;
    const auto& cur = a.engagements[i].timestamp;
    bool ok = cur ? (prev && *prev <= *cur) : true;
    if (!ok) fail("engagements not sorted by timestamp (absent last)");
  }
}

namespace {

void sort_engagements(std::vector<Engagement>& es) {
  std::stable_sort(es.begin(), es.end(),
                   [](const Engagement& a, const Engagement& b) {
                     if (a.timestamp && b.timestamp)
                       return *a.timestamp < *b.timestamp;
                     return a.timestamp.has_value() && !b.timestamp.has_value();
                   });
}

NewsArticle article_from_json(const ordered_json& j, const std::string& where) {
  NewsArticle a;
  auto require = [&](const char* key) -> const ordered_json& {
    auto it = j.find(key);
    if (it == j.end())
      throw ValidationError(where + ": missing field \"" + key + "\"");
    return *it;
  };
  a.id = require("id").get<std::string>();
  a.domain = domain_from_string(require("domain").get<std::string>());
  const ordered_json& label = require("label");
  if (!label.is_null()) {
    int v = label.get<int>();
    if (v != 0 && v != 1)
      throw ValidationError(where + ": label must be 0, 1 or null");
    a.label = static_cast<Label>(v);
  }
  const ordered_json& content = require("content");
  a.content.headline = nfc(content.at("headline").get<std::string>());
  a.content.text = nfc(content.at("text").get<std::string>());
  const ordered_json& pub = require("publisher");
  a.publisher.user_name = pub.at("user_name").get<std::string>();
  a.publisher.sex = sex_from_string(pub.at("sex").get<std::string>());
  if (pub.contains("age") && !pub.at("age").is_null())
    a.publisher.age = pub.at("age").get<int>();
  const ordered_json& engs = require("engagements");
  if (!engs.is_array())
    throw ValidationError(where + ": engagements must be an array");
  for (const auto& ej : engs) {
    Engagement e;
    e.user_id = ej.at("user_id").get<std::string>();
    e.post_id = ej.at("post_id").get<std::string>();
    if (ej.contains("timestamp") && !ej.at("timestamp").is_null())
      e.timestamp = ej.at("timestamp").get<std::int64_t>();
    a.engagements.push_back(std::move(e));
  }
  sort_engagements(a.engagements);
  validate_article(a, where);
  return a;
}

ordered_json article_to_json(const NewsArticle& a) {
  ordered_json j;
  j["id"] = a.id;
  j["domain"] = to_string(a.domain);
  if (a.label)
    j["label"] = static_cast<int>(*a.label);
  else
    j["label"] = nullptr;
  j["content"] = {{"headline", a.content.headline}, {"text", a.content.text}};
  ordered_json pub;
  pub["user_name"] = a.publisher.user_name;
  pub["sex"] = to_string(a.publisher.sex);
  if (a.publisher.age)
    pub["age"] = *a.publisher.age;
  else
    pub["age"] = nullptr;
  j["publisher"] = std::move(pub);
  ordered_json engs = ordered_json::array();
  for (const Engagement& e : a.engagements) {
    ordered_json ej;
    ej["user_id"] = e.user_id;
    ej["post_id"] = e.post_id;
    if (e.timestamp)
      ej["timestamp"] = *e.timestamp;
    else
      ej["timestamp"] = nullptr;
    engs.push_back(std::move(ej));
  }
  j["engagements"] = std::move(engs);
  return j;
}

}  // namespace

Corpus parse_corpus(std::istream& in, const std::string& name) {
  Corpus corpus;
  corpus.name = name;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string where = name + ":" + std::to_string(line_no);
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + ": malformed JSON: " + e.what());
    }
    NewsArticle a = article_from_json(j, where);
    if (!seen_ids.insert(a.id).second)
      throw ValidationError(where + ": duplicate article id \"" + a.id + "\"");
    corpus.articles.push_back(std::move(a));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open corpus file: " + path);
  return parse_corpus(in, path);
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const NewsArticle& a : corpus.articles) {
    out += article_to_json(a).dump();
    out += '\n';
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << corpus_to_jsonl(corpus);
  if (!out) throw ValidationError("failed writing corpus to " + path);
}

namespace {

// Apportions `total` into |weights| buckets by largest remainder.
std::vector<int> apportion(int total, const std::vector<double>& weights) {
  double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> counts(weights.size(), 0);
  std::vector<std::pair<double, std::size_t>> rema;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double exact = total * weights[i] / wsum;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    rema.push_back({exact - counts[i], i});
  }
  std::stable_sort(rema.begin(), rema.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; k < total - assigned; ++k) counts[rema[k].second] += 1;
  return counts;
}

}  // namespace

std::pair<Corpus, Corpus> split(const Corpus& corpus, double train_fraction,
                                std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ArgumentError("train_fraction must be in (0, 1)");
  std::array<std::vector<std::size_t>, 2> by_label;
  for (std::size_t i = 0; i < corpus.articles.size(); ++i) {
    const auto& a = corpus.articles[i];
    if (!a.label)
      throw ValidationError("cannot split a corpus with unlabeled articles (id " +
                            a.id + ")");
    by_label[static_cast<int>(*a.label)].push_back(i);
  }
  if (by_label[0].size() < 2 || by_label[1].size() < 2)
    throw ValidationError("split requires at least 2 articles of each label");

  const auto n = static_cast<std::int64_t>(corpus.size());
  const auto n_train =
      static_cast<std::int64_t>(std::llround(train_fraction * n));

  // Largest-remainder allocation across the two strata so the per-label
  // counts sum exactly to round(fraction * N).
  std::array<std::int64_t, 2> take{};
  std::array<double, 2> exact{};
  std::int64_t assigned = 0;
  for (int l = 0; l < 2; ++l) {
    exact[l] = train_fraction * static_cast<double>(by_label[l].size());
    take[l] = static_cast<std::int64_t>(std::floor(exact[l]));
    assigned += take[l];
  }
  for (std::int64_t k = assigned; k < n_train; ++k) {
    int pick = (exact[0] - std::floor(exact[0])) >=
                       (exact[1] - std::floor(exact[1]))
                   ? 0
                   : 1;
    // Second leftover unit (if any) goes to the other stratum.
    if (k > assigned) pick = 1 - pick;
    take[pick] += 1;
  }

  Rng rng(seed);
  Corpus train, test;
  train.name = corpus.name + "/train";
  test.name = corpus.name + "/test";
  std::vector<std::size_t> train_idx, test_idx;
  for (int l = 0; l < 2; ++l) {
    std::vector<std::size_t> idx = by_label[l];
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (static_cast<std::int64_t>(i) < take[l])
        train_idx.push_back(idx[i]);
      else
        test_idx.push_back(idx[i]);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  for (std::size_t i : train_idx) train.articles.push_back(corpus.articles[i]);
  for (std::size_t i : test_idx) test.articles.push_back(corpus.articles[i]);
  return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

namespace {

// Commonly used Ethiopic syllables (fully assigned rows of the block).
constexpr char32_t kSyllables[] = {
    0x1208, 0x1209, 0x120A, 0x120B, 0x120D, 0x1218, 0x1219, 0x121A, 0x121B,
    0x121D, 0x1228, 0x1229, 0x122A, 0x122B, 0x122D, 0x1230, 0x1231, 0x1232,
    0x1233, 0x1235, 0x1260, 0x1261, 0x1262, 0x1263, 0x1265, 0x1270, 0x1271,
    0x1272, 0x1273, 0x1275, 0x1290, 0x1291, 0x1292, 0x1293, 0x1295, 0x12A0,
    0x12A1, 0x12A2, 0x12A3, 0x12A5, 0x12A8, 0x12A9, 0x12AA, 0x12AB, 0x12AD,
    0x12C8, 0x12C9, 0x12CA, 0x12CB, 0x12CD, 0x12D8, 0x12D9, 0x12DA, 0x12DB,
    0x12DD, 0x12E8, 0x12E9, 0x12EA, 0x12EB, 0x12ED, 0x12F0, 0x12F1, 0x12F2,
    0x12F3, 0x12F5, 0x1308, 0x1309, 0x130A, 0x130B, 0x130D, 0x1320, 0x1321,
    0x1322, 0x1323, 0x1325, 0x1348, 0x1349, 0x134A, 0x134B, 0x134D,
};
constexpr int kSyllableCount =
    static_cast<int>(sizeof(kSyllables) / sizeof(kSyllables[0]));

// Table-derived domain weights.
struct DomainWeight {
  Domain domain;
  double weight;
};
constexpr DomainWeight kDomainWeights[] = {
    {Domain::kBusiness, 2112.0},  {Domain::kHealth, 967.0},
    {Domain::kPolitics, 4003.0},  {Domain::kSport, 1285.0},
    {Domain::kReligion, 2960.0},  {Domain::kTechnology, 673.0},
};

// Ordinary words draw from the front of the syllable list; markers use a
// reserved tail slice so their character n-grams never collide with
// content words.
constexpr int kMarkerSyllableStart = kSyllableCount - 10;

std::string make_word(Rng& rng, int min_syl, int max_syl, int syl_lo,
                      int syl_hi) {
  int n = static_cast<int>(rng.uniform_range(min_syl, max_syl));
  std::string w;
  for (int i = 0; i < n; ++i)
    utf8_append(w, kSyllables[syl_lo + rng.uniform_int(syl_hi - syl_lo)]);
  return w;
}

struct WordPools {
  std::vector<std::string> shared;                 // domain-agnostic
  std::array<std::vector<std::string>, 6> domain;  // per-domain topical
  std::vector<std::string> markers;                // planted in fakes only
};

WordPools build_pools(std::uint64_t seed) {
  // Separate stream so pool contents depend on the seed alone, not on how
  // many draws article generation makes.
  Rng rng(seed ^ 0x706F6F6C73ULL);  // "pools"
  WordPools pools;
  std::unordered_set<std::string> used;
  auto fresh = [&](int min_syl, int max_syl, int lo, int hi) {
    for (;;) {
      std::string w = make_word(rng, min_syl, max_syl, lo, hi);
      if (used.insert(w).second) return w;
    }
  };
  for (int i = 0; i < 120; ++i)
    pools.shared.push_back(fresh(2, 4, 0, kMarkerSyllableStart));
  for (auto& dp : pools.domain)
    for (int i = 0; i < 30; ++i)
      dp.push_back(fresh(2, 4, 0, kMarkerSyllableStart));
  for (int i = 0; i < 8; ++i)
    pools.markers.push_back(
        fresh(5, 6, kMarkerSyllableStart, kSyllableCount));
  return pools;
}

// Domain flavor is kept mild: topical words are a modest slice of each
// article so chance label/domain skew in a train split cannot dominate
// the lexical channel.
std::string draw_token(Rng& rng, const WordPools& pools, Domain domain) {
  if (rng.uniform() < 0.18) {
    const auto& dp = pools.domain[static_cast<int>(domain)];
    return dp[rng.uniform_int(dp.size())];
  }
  return pools.shared[rng.uniform_int(pools.shared.size())];
}

}  // namespace

std::vector<std::string> planted_marker_tokens(const GenConfig& config) {
  return build_pools(config.seed).markers;
}

Corpus generate_synthetic(const GenConfig& config) {
  if (config.n_articles < 4)
    throw ArgumentError("generate_synthetic requires n_articles >= 4");
  if (!(config.fake_fraction > 0.0 && config.fake_fraction < 1.0))
    throw ArgumentError("fake_fraction must be in (0, 1)");
  const int n = config.n_articles;
  const int n_fake = static_cast<int>(std::llround(n * config.fake_fraction));
  if (n * config.fake_fraction < 1.0 || n_fake < 1 || n - n_fake < 1)
    throw ArgumentError("degenerate generator config: each label needs at "
                        "least one article");
  const double s_lex = config.lexical();
  const double s_eng = config.engagement();
  if (s_lex < 0 || s_lex > 1 || s_eng < 0 || s_eng > 1)
    throw ArgumentError("signal strengths must be in [0, 1]");

  const WordPools pools = build_pools(config.seed);
  Rng rng(config.seed);

  // Domain quotas, then fake quotas inside each domain, both by largest
  // remainder so totals match exactly.
  std::vector<double> weights;
  for (const auto& dw : kDomainWeights) weights.push_back(dw.weight);
  std::vector<int> per_domain = apportion(n, weights);
  std::vector<double> fake_weights;
  for (int c : per_domain) fake_weights.push_back(static_cast<double>(c));
  std::vector<int> fake_per_domain = apportion(n_fake, fake_weights);

  struct Slot {
    Domain domain;
    Label label;
  };
  std::vector<Slot> slots;
  slots.reserve(n);
  for (std::size_t d = 0; d < weights.size(); ++d) {
    for (int i = 0; i < per_domain[d]; ++i) {
      Label label = i < fake_per_domain[d] ? Label::kFake : Label::kReal;
      slots.push_back({kDomainWeights[d].domain, label});
    }
  }
  rng.shuffle(slots);

  Corpus corpus;
  {
    std::ostringstream name;
    name << "synthetic-n" << n << "-s" << config.signal_strength << "-seed"
         << config.seed;
    corpus.name = name.str();
  }
  corpus.articles.reserve(n);

  const double lambda_real = 2.0;
  const double lambda_boost = 12.0;
  const double gap_mean_real = 600.0;

  for (int i = 0; i < n; ++i) {
    const Slot& slot = slots[i];
    const bool fake = slot.label == Label::kFake;
    NewsArticle a;
    {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "a%05d", i);
      a.id = buf;
    }
    a.domain = slot.domain;
    a.label = slot.label;

    // Publisher profile carries no label signal.
    {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "src_%02d",
                    static_cast<int>(rng.uniform_int(50)));
      a.publisher.user_name = buf;
      double u = rng.uniform();
      a.publisher.sex =
          u < 0.45 ? Sex::kMale : (u < 0.80 ? Sex::kFemale : Sex::kUnknown);
      if (rng.uniform() < 0.7)
        a.publisher.age = static_cast<int>(rng.uniform_range(18, 79));
    }

    // Content. Token counts are sized so mean text length sits near 128
    // characters, matching the reference corpus statistic.
    {
      int headline_tokens = static_cast<int>(rng.uniform_range(4, 7));
      std::string headline;
      for (int t = 0; t < headline_tokens; ++t) {
        if (t) headline += ' ';
        headline += draw_token(rng, pools, slot.domain);
      }
      int text_tokens = static_cast<int>(rng.uniform_range(24, 38));
      std::vector<std::string> words;
      words.reserve(text_tokens + 3);
      for (int t = 0; t < text_tokens; ++t)
        words.push_back(draw_token(rng, pools, slot.domain));
      // Lexical channel: markers appear only in fakes. Each fake draws
      // Binomial(3, lexical_signal) marker insertions, so the expected
      // marker rate is proportional to the signal and signal 0/1 are the
      // exact no-marker / always-marked endpoints.
      if (fake) {
        int n_markers = 0;
        for (int trial = 0; trial < 3; ++trial)
          n_markers += rng.uniform() < s_lex ? 1 : 0;
        for (int m = 0; m < n_markers; ++m) {
          std::size_t pos = rng.uniform_int(words.size() + 1);
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos),
                       pools.markers[rng.uniform_int(pools.markers.size())]);
        }
      }
      std::string text;
      for (std::size_t t = 0; t < words.size(); ++t) {
        if (t) text += ' ';
        text += words[t];
      }
      a.content.headline = std::move(headline);
      a.content.text = std::move(text);
    }

    // Engagement channel: fakes accumulate more engagements over longer
    // spans, with the gap between the label means set by the engagement
    // signal.
    {
      double lambda = lambda_real + (fake ? s_eng * lambda_boost : 0.0);
      int count = rng.poisson(lambda);
      double gap_mean = gap_mean_real * (fake ? 1.0 + 1.5 * s_eng : 1.0);
      std::int64_t t = rng.uniform_range(0, 86400L * 30);
      int user_pool = std::max(2, 3 * count);
      for (int e = 0; e < count; ++e) {
        Engagement eng;
        char buf[24];
        std::snprintf(buf, sizeof(buf), "u%04d",
                      static_cast<int>(rng.uniform_int(user_pool)));
        eng.user_id = buf;
        std::snprintf(buf, sizeof(buf), "p%08llx",
                      static_cast<unsigned long long>(rng.next_u64() & 0xFFFFFFFFULL));
        eng.post_id = buf;
        t += static_cast<std::int64_t>(std::ceil(rng.exponential(gap_mean)));
        if (rng.uniform() < 0.03)
          eng.timestamp.reset();  // engagement recorded without a time
        else
          eng.timestamp = t;
        a.engagements.push_back(std::move(eng));
      }
      sort_engagements(a.engagements);
    }

    validate_article(a, corpus.name + "/" + a.id);
    corpus.articles.push_back(std::move(a));
  }
  return corpus;
}

}  // namespace fnd
