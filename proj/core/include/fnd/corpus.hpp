#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fnd {

enum class Sex { kMale, kFemale, kUnknown };

enum class Domain {
  kBusiness,
  kHealth,
  kPolitics,
  kSport,
  kReligion,
  kTechnology
};

// 0 = real, 1 = fake.
enum class Label : int { kReal = 0, kFake = 1 };

const char* to_string(Sex s);
const char* to_string(Domain d);
Sex sex_from_string(const std::string& s);
Domain domain_from_string(const std::string& s);
constexpr int kDomainCount = 6;

struct Publisher {
  std::string user_name;
  Sex sex = Sex::kUnknown;
  std::optional<int> age;  // years, in [0, 150] when present
};

struct Content {
  std::string headline;
  std::string text;  // NFC-normalized at load
};

// One share of the article. An absent timestamp is the "no engagement time
// recorded" case; such entries sort after all timestamped ones.
struct Engagement {
  std::string user_id;
  std::string post_id;
  std::optional<std::int64_t> timestamp;  // seconds since corpus epoch
};

struct NewsArticle {
  std::string id;
  Domain domain = Domain::kPolitics;
  Publisher publisher;
  Content content;
  std::vector<Engagement> engagements;
  std::optional<Label> label;  // absent only for inference inputs
};

struct Corpus {
  std::string name;
  std::vector<NewsArticle> articles;

  std::size_t size() const { return articles.size(); }
};

// Validates every type invariant on the article; throws ValidationError
// with `where` prefixed on failure.
void validate_article(const NewsArticle& a, const std::string& where);

// JSONL corpus I/O. One object per line:
// {"id","domain","label","content":{"headline","text"},
//  "publisher":{"user_name","sex","age"},
//  "engagements":[{"user_id","post_id","timestamp"}]}
// Unknown keys are ignored. Text fields are NFC-normalized and engagements
// sorted (absent timestamps last) on load.
Corpus load_corpus(const std::string& path);
Corpus parse_corpus(std::istream& in, const std::string& name);
void write_corpus(const Corpus& corpus, const std::string& path);
std::string corpus_to_jsonl(const Corpus& corpus);

// Deterministic stratified-by-label split. |train| = round(fraction * N),
// with per-label counts allocated by largest remainder so the stratification
// matches the total exactly. Partitions are disjoint and exhaustive.
std::pair<Corpus, Corpus> split(const Corpus& corpus, double train_fraction,
                                std::uint64_t seed);

struct GenConfig {
  int n_articles = 1000;
  double fake_fraction = 0.5;
  // Overall signal; the two channels below default to it but can be set
  // independently (lexical markers vs engagement statistics).
  double signal_strength = 1.0;
  double lexical_signal = -1.0;     // -1 => follow signal_strength
  double engagement_signal = -1.0;  // -1 => follow signal_strength
  std::uint64_t seed = 0;

  double lexical() const {
    return lexical_signal < 0 ? signal_strength : lexical_signal;
  }
  double engagement() const {
    return engagement_signal < 0 ? signal_strength : engagement_signal;
  }
};

// Seeded synthetic corpus standing in for a non-public dataset. Fake
// articles plant marker tokens at a rate proportional to the lexical signal
// and draw engagement counts/time spans with higher means than real ones,
// scaled by the engagement signal. Domain proportions follow the reference
// corpus (politics 4003/12000, religion 2960, business 2112, sport 1285,
// health 967, technology 673); labels are balanced by default.
Corpus generate_synthetic(const GenConfig& config);

// The marker tokens the generator plants for this config's seed.
std::vector<std::string> planted_marker_tokens(const GenConfig& config);

}  // namespace fnd
