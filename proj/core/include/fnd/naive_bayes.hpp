#pragma once

#include <vector>

#include "fnd/classifier.hpp"

namespace fnd {

// Multinomial naive Bayes over raw term counts, Laplace smoothing alpha,
// computed in log space: P(c|d) proportional to P(c) * prod P(t|c)^count.
// Rows must be nonnegative (counts, not tf-idf).
class MultinomialNaiveBayes : public ProbClassifier {
 public:
  explicit MultinomialNaiveBayes(double alpha = 1.0) : alpha_(alpha) {}

  void fit(const std::vector<FeatureVector>& rows,
           const std::vector<int>& labels) override;
  std::array<double, 2> predict_proba(const FeatureVector& row) const override;

  double alpha() const { return alpha_; }
  const std::array<double, 2>& log_prior() const { return log_prior_; }
  const std::array<std::vector<double>, 2>& log_likelihood() const {
    return log_likelihood_;
  }
  // Direct parameter injection (model reload).
  void set_params(std::array<double, 2> log_prior,
                  std::array<std::vector<double>, 2> log_likelihood);

 private:
  double alpha_;
  std::array<double, 2> log_prior_{};
  std::array<std::vector<double>, 2> log_likelihood_;  // per class, per term
  bool fitted_ = false;
};

}  // namespace fnd
