#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fnd/corpus.hpp"
#include "fnd/scorer.hpp"

namespace fnd {

// Class "fake" (1) is the positive class.
struct ConfusionMatrix {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
};

struct ClassMetrics {
  double precision = 0, recall = 0, f1 = 0;
};

struct EvalReport {
  std::string model_kind;
  std::string corpus_name;
  std::uint64_t seed = 0;
  std::string split_fingerprint;  // set by compare()
  std::int64_t n = 0;
  double accuracy = 0;
  ClassMetrics real;   // label 0
  ClassMetrics fake;   // label 1
  ClassMetrics macro;  // unweighted mean of the two classes
  ConfusionMatrix confusion;
  bool failed = false;
  std::string error;
};

// Precision/recall/F1 with fixed 0/0 conventions: precision is 0 when
// nothing was predicted positive, recall is 0 when nothing is positive,
// F1 is 0 when precision + recall is 0. Macro = unweighted class mean.
EvalReport metrics(const std::vector<int>& predictions,
                   const std::vector<int>& gold);

// Predicts every article of a labeled corpus and reports metrics.
EvalReport evaluate(const ArticleScorer& model, const Corpus& corpus_test);

// Table-4-style ingestion of third-party probabilities: label = fake iff
// p_fake > threshold (ties go to real, same as classifier tie-breaks).
struct ExternalScores {
  std::map<std::string, double> p_fake_by_id;
};
ExternalScores load_external_scores(const std::string& path);
EvalReport evaluate_external(const ExternalScores& scores,
                             const Corpus& corpus_test,
                             double threshold = 0.5);

// Shared-split comparison across model kinds. Every kind trains on the
// same 80/20 split (fingerprint recorded in each report); failures are
// recorded in-table rather than thrown. Reports are sorted by macro-F1
// descending, failed rows last.
struct CompareResult {
  std::vector<EvalReport> reports;
  std::string split_fingerprint;
  std::uint64_t seed = 0;
};
class ModelRegistry;
CompareResult compare(const Corpus& corpus,
                      const std::vector<std::string>& kinds,
                      std::uint64_t seed,
                      const ModelRegistry* extra_kinds = nullptr);

std::string report_to_json(const EvalReport& report);
std::string compare_to_json(const CompareResult& result);
std::string compare_to_text(const CompareResult& result);

// FNV-1a hash of the ordered article ids on both sides; lets reports prove
// they saw identical splits.
std::string split_fingerprint(const Corpus& train, const Corpus& test);

}  // namespace fnd
