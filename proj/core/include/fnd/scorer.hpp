#pragma once

#include <array>

#include "fnd/corpus.hpp"

namespace fnd {

// Article-level probabilistic scorer: the common face of every trained
// model (classical, sequence, stacked) and of test stubs. Implementations
// are immutable once constructed and safe to share across threads.
class ArticleScorer {
 public:
  virtual ~ArticleScorer() = default;

  virtual double p_fake(const NewsArticle& a) const = 0;

  std::array<double, 2> predict_proba(const NewsArticle& a) const {
    double p = p_fake(a);
    return {1.0 - p, p};
  }
  // Argmax with ties toward label 0 (real).
  int predict(const NewsArticle& a) const {
    auto pr = predict_proba(a);
    return pr[1] > pr[0] ? 1 : 0;
  }
};

}  // namespace fnd
