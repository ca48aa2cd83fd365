#include "fnd/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fnd/errors.hpp"
#include "fnd/parallel.hpp"
#include "fnd/unicode.hpp"

namespace fnd {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<char32_t> cps = nfc(utf8_decode(text));
  for (char32_t& c : cps) c = latin_to_lower(c);

  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = cps.size();
  while (i < n) {
    while (i < n && is_white_space(cps[i])) ++i;
    std::size_t start = i;
    while (i < n && !is_white_space(cps[i])) ++i;
    std::size_t end = i;
    while (start < end && is_punctuation(cps[start])) ++start;
    while (end > start && is_punctuation(cps[end - 1])) --end;
    if (start < end) {
      std::string tok;
      for (std::size_t k = start; k < end; ++k) utf8_append(tok, cps[k]);
      tokens.push_back(std::move(tok));
    }
  }
  return tokens;
}

double FeatureVector::l2_norm() const {
  double s = 0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

void Vocabulary::rebuild_index() {
  index.clear();
  index.reserve(terms.size());
  for (std::uint32_t i = 0; i < terms.size(); ++i) index[terms[i]] = i;
}

namespace {

std::vector<std::string> article_tokens(const NewsArticle& a) {
  std::vector<std::string> toks = tokenize(a.content.headline);
  std::vector<std::string> body = tokenize(a.content.text);
  toks.insert(toks.end(), body.begin(), body.end());
  return toks;
}

// Emits every encoded term of the document once per occurrence. Word
// n-grams come from the token sequence; character n-grams from the tokens
// joined with single spaces (so the char view is insensitive to the
// original whitespace and stripped punctuation).
template <typename Fn>
void for_each_term(const std::vector<std::string>& tokens,
                   const FeatureConfig& cfg, Fn&& emit) {
  for (int n = cfg.word_ngram_min; n <= cfg.word_ngram_max; ++n) {
    if (n < 1 || tokens.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string term = "w:";
      for (int k = 0; k < n; ++k) {
        if (k) term += ' ';
        term += tokens[i + k];
      }
      emit(std::move(term));
    }
  }
  if (cfg.char_ngram_min >= 1 && cfg.char_ngram_max >= cfg.char_ngram_min) {
    std::string joined;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) joined += ' ';
      joined += tokens[i];
    }
    std::vector<char32_t> cps = utf8_decode(joined);
    for (int n = cfg.char_ngram_min; n <= cfg.char_ngram_max; ++n) {
      if (cps.size() < static_cast<std::size_t>(n)) continue;
      for (std::size_t i = 0; i + n <= cps.size(); ++i) {
        std::string term = "c:";
        for (int k = 0; k < n; ++k) utf8_append(term, cps[i + k]);
        emit(std::move(term));
      }
    }
  }
}

}  // namespace

const std::array<std::string, kSocialFeatureCount>& social_feature_names() {
  static const std::array<std::string, kSocialFeatureCount> names = {
      "engagement_count", "distinct_user_count", "distinct_post_count",
      "time_span",        "mean_gap",            "has_any_engagement",
      "publisher_age",    "sex_male",            "sex_female",
      "sex_unknown"};
  return names;
}

std::array<double, kSocialFeatureCount> social_features(const NewsArticle& a) {
  std::array<double, kSocialFeatureCount> f{};
  f[0] = static_cast<double>(a.engagements.size());
  std::set<std::string_view> users, posts;
  std::vector<std::int64_t> times;
  for (const Engagement& e : a.engagements) {
    users.insert(e.user_id);
    posts.insert(e.post_id);
    if (e.timestamp) times.push_back(*e.timestamp);
  }
  f[1] = static_cast<double>(users.size());
  f[2] = static_cast<double>(posts.size());
  if (times.size() >= 2) {
    auto [mn, mx] = std::minmax_element(times.begin(), times.end());
    f[3] = static_cast<double>(*mx - *mn);
    std::sort(times.begin(), times.end());
    double gaps = 0;
    for (std::size_t i = 1; i < times.size(); ++i)
      gaps += static_cast<double>(times[i] - times[i - 1]);
    f[4] = gaps / static_cast<double>(times.size() - 1);
  }
  f[5] = a.engagements.empty() ? 0.0 : 1.0;
  f[6] = a.publisher.age ? static_cast<double>(*a.publisher.age) : -1.0;
  f[7] = a.publisher.sex == Sex::kMale ? 1.0 : 0.0;
  f[8] = a.publisher.sex == Sex::kFemale ? 1.0 : 0.0;
  f[9] = a.publisher.sex == Sex::kUnknown ? 1.0 : 0.0;
  return f;
}

const char* to_string(FeatureMode m) {
  switch (m) {
    case FeatureMode::kContentOnly:
      return "content";
    case FeatureMode::kSocialOnly:
      return "social";
    default:
      return "hybrid";
  }
}

FeatureMode feature_mode_from_string(const std::string& s) {
  if (s == "content") return FeatureMode::kContentOnly;
  if (s == "social") return FeatureMode::kSocialOnly;
  if (s == "hybrid") return FeatureMode::kHybrid;
  throw ValidationError("unknown feature mode: \"" + s + "\"");
}

FeatureSpace fit_feature_space(const Corpus& corpus,
                               const FeatureConfig& config) {
  if (corpus.articles.empty())
    throw ArgumentError("cannot fit a feature space on an empty corpus");

  // std::map keeps terms lexicographically ordered, which fixes the index
  // assignment.
  std::map<std::string, std::uint32_t> df;
  for (const NewsArticle& a : corpus.articles) {
    std::set<std::string> doc_terms;
    for_each_term(article_tokens(a), config,
                  [&](std::string term) { doc_terms.insert(std::move(term)); });
    for (const std::string& t : doc_terms) df[t] += 1;
  }

  FeatureSpace space;
  space.vocabulary.config = config;
  space.vocabulary.n_documents = static_cast<std::uint32_t>(corpus.size());
  for (auto& [term, count] : df) {
    if (count < static_cast<std::uint32_t>(std::max(1, config.min_df)))
      continue;
    space.vocabulary.terms.push_back(term);
    space.vocabulary.df.push_back(count);
  }
  if (space.vocabulary.terms.empty())
    throw TrainingError("feature space fit produced an empty vocabulary "
                        "(min_df too high or corpus too small)");
  space.vocabulary.rebuild_index();

  space.social_names.assign(social_feature_names().begin(),
                            social_feature_names().end());
  const std::size_t s = kSocialFeatureCount;
  std::vector<double> mean(s, 0.0), var(s, 0.0);
  for (const NewsArticle& a : corpus.articles) {
    auto f = social_features(a);
    for (std::size_t k = 0; k < s; ++k) mean[k] += f[k];
  }
  for (double& m : mean) m /= static_cast<double>(corpus.size());
  for (const NewsArticle& a : corpus.articles) {
    auto f = social_features(a);
    for (std::size_t k = 0; k < s; ++k) {
      double d = f[k] - mean[k];
      var[k] += d * d;
    }
  }
  space.social_mean = mean;
  space.social_stdev.resize(s);
  for (std::size_t k = 0; k < s; ++k)
    space.social_stdev[k] = std::sqrt(var[k] / static_cast<double>(corpus.size()));
  space.fitted = true;
  return space;
}

namespace {

// Accumulates term counts of one document projected onto the vocabulary.
std::map<std::uint32_t, double> content_counts(const NewsArticle& a,
                                               const FeatureSpace& space) {
  std::map<std::uint32_t, double> counts;
  for_each_term(article_tokens(a), space.vocabulary.config,
                [&](std::string term) {
                  auto it = space.vocabulary.index.find(term);
                  if (it != space.vocabulary.index.end())
                    counts[it->second] += 1.0;
                });
  return counts;
}

void require_fitted(const FeatureSpace& space) {
  if (!space.fitted) throw StateError("feature space is not fitted");
}

}  // namespace

FeatureVector count_transform(const NewsArticle& a, const FeatureSpace& space) {
  require_fitted(space);
  FeatureVector v;
  v.dimension = space.vocabulary.size();
  for (auto& [idx, count] : content_counts(a, space)) {
    v.indices.push_back(idx);
    v.values.push_back(count);
  }
  return v;
}

FeatureVector tfidf_transform(const NewsArticle& a, const FeatureSpace& space) {
  require_fitted(space);
  FeatureVector v;
  v.dimension = space.vocabulary.size();
  const double n_docs = static_cast<double>(space.vocabulary.n_documents);
  double norm_sq = 0;
  for (auto& [idx, count] : content_counts(a, space)) {
    double idf = std::log((1.0 + n_docs) /
                          (1.0 + static_cast<double>(space.vocabulary.df[idx]))) +
                 1.0;
    double w = count * idf;
    v.indices.push_back(idx);
    v.values.push_back(w);
    norm_sq += w * w;
  }
  if (norm_sq > 0) {
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& w : v.values) w *= inv;
  }
  return v;
}

FeatureVector vectorize(const NewsArticle& a, const FeatureSpace& space,
                        FeatureMode mode) {
  require_fitted(space);
  if (space.social_mean.size() != space.social_names.size() ||
      space.social_stdev.size() != space.social_names.size())
    throw StateError("feature space lacks social statistics for this mode");
  FeatureVector v;
  if (mode != FeatureMode::kSocialOnly) {
    v = tfidf_transform(a, space);
  }
  v.dimension = space.total_dimension();
  if (mode != FeatureMode::kContentOnly) {
    const std::uint32_t base = space.vocabulary.size();
    auto f = social_features(a);
    for (std::size_t k = 0; k < f.size(); ++k) {
      double sd = space.social_stdev[k];
      double z = sd > 0 ? (f[k] - space.social_mean[k]) / sd : 0.0;
      if (z != 0.0) {
        v.indices.push_back(base + static_cast<std::uint32_t>(k));
        v.values.push_back(z);
      }
    }
  }
  return v;
}

std::vector<FeatureVector> vectorize_all(const Corpus& corpus,
                                         const FeatureSpace& space,
                                         FeatureMode mode) {
  std::vector<FeatureVector> rows(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) {
    rows[i] = vectorize(corpus.articles[i], space, mode);
  });
  return rows;
}

}  // namespace fnd
