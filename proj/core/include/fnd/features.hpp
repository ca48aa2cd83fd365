#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fnd/corpus.hpp"

namespace fnd {

// NFC-normalize, lowercase Latin ranges, split on Unicode whitespace, strip
// leading/trailing punctuation per token, drop empties. Ethiopic passes
// through untouched apart from the whitespace split.
std::vector<std::string> tokenize(std::string_view text);

struct FeatureConfig {
  int word_ngram_min = 1;
  int word_ngram_max = 2;
  int char_ngram_min = 3;  // set max < min to disable char n-grams
  int char_ngram_max = 5;
  int min_df = 2;
};

// Sparse row. Indices strictly increasing, values finite; the content
// sub-block is L2-normalized (norm 0 only for all-OOV documents).
struct FeatureVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::uint32_t dimension = 0;

  double l2_norm() const;
};

struct Vocabulary {
  // Terms in index order. Word n-grams are encoded "w:tok tok", character
  // n-grams "c:gram"; indices are assigned by lexicographic order of the
  // encoded term, so refits are reproducible.
  std::vector<std::string> terms;
  std::vector<std::uint32_t> df;  // parallel to terms
  std::uint32_t n_documents = 0;
  FeatureConfig config;
  std::unordered_map<std::string, std::uint32_t> index;

  std::uint32_t size() const { return static_cast<std::uint32_t>(terms.size()); }
  void rebuild_index();
};

// Social-context block. The reference engagement model names publisher
// profile and engagement dynamics but not a concrete feature list; this is
// the reconstruction used throughout (documented in the README).
constexpr std::size_t kSocialFeatureCount = 10;
const std::array<std::string, kSocialFeatureCount>& social_feature_names();
std::array<double, kSocialFeatureCount> social_features(const NewsArticle& a);

enum class FeatureMode { kContentOnly, kSocialOnly, kHybrid };
const char* to_string(FeatureMode m);
FeatureMode feature_mode_from_string(const std::string& s);

struct FeatureSpace {
  Vocabulary vocabulary;
  std::vector<std::string> social_names;
  std::vector<double> social_mean;   // train-set statistics for z-scoring
  std::vector<double> social_stdev;  // population stdev; 0 => feature emitted as 0
  bool fitted = false;

  std::uint32_t total_dimension() const {
    return vocabulary.size() + static_cast<std::uint32_t>(social_names.size());
  }
};

// Builds the vocabulary from headline+text of the given (training) articles
// and records social-feature statistics for z-scoring.
FeatureSpace fit_feature_space(const Corpus& corpus,
                               const FeatureConfig& config = {});

// Content block only: tf * (ln((1+N)/(1+df)) + 1), L2-normalized.
FeatureVector tfidf_transform(const NewsArticle& a, const FeatureSpace& space);

// Raw term counts over the content block (dimension = |vocab|); input
// representation for multinomial naive Bayes.
FeatureVector count_transform(const NewsArticle& a, const FeatureSpace& space);

// Full row: content block plus z-scored social block, masked by mode. The
// dimension is always |vocab| + |social|; masking only drops entries.
FeatureVector vectorize(const NewsArticle& a, const FeatureSpace& space,
                        FeatureMode mode);

std::vector<FeatureVector> vectorize_all(const Corpus& corpus,
                                         const FeatureSpace& space,
                                         FeatureMode mode);

}  // namespace fnd
