#include "fnd/naive_bayes.hpp"

#include <cmath>

#include "fnd/errors.hpp"

namespace fnd {

void MultinomialNaiveBayes::fit(const std::vector<FeatureVector>& rows,
                                const std::vector<int>& labels) {
  if (rows.empty()) throw ArgumentError("naive Bayes fit requires rows");
  if (rows.size() != labels.size())
    throw ArgumentError("rows/labels size mismatch");
  const std::uint32_t d = rows.front().dimension;

  std::array<std::vector<double>, 2> counts = {std::vector<double>(d, 0.0),
                                               std::vector<double>(d, 0.0)};
  std::array<double, 2> class_docs{};
  std::array<double, 2> class_total{};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int c = labels[i];
    class_docs[c] += 1;
    for (std::size_t k = 0; k < rows[i].indices.size(); ++k) {
      double v = rows[i].values[k];
      if (v < 0)
        throw ArgumentError("naive Bayes requires nonnegative feature values");
      counts[c][rows[i].indices[k]] += v;
      class_total[c] += v;
    }
  }
  for (int c = 0; c < 2; ++c) {
    log_prior_[c] = std::log((class_docs[c] > 0 ? class_docs[c] : 0.5) /
                             static_cast<double>(rows.size()));
    log_likelihood_[c].resize(d);
    double denom = class_total[c] + alpha_ * d;
    for (std::uint32_t t = 0; t < d; ++t)
      log_likelihood_[c][t] = std::log((counts[c][t] + alpha_) / denom);
  }
  fitted_ = true;
}

std::array<double, 2> MultinomialNaiveBayes::predict_proba(
    const FeatureVector& row) const {
  if (!fitted_) throw StateError("naive Bayes is not fitted");
  std::array<double, 2> logp = log_prior_;
  for (std::size_t k = 0; k < row.indices.size(); ++k) {
    double v = row.values[k];
    if (v < 0)
      throw ArgumentError("naive Bayes requires nonnegative feature values");
    const std::uint32_t t = row.indices[k];
    if (t >= log_likelihood_[0].size()) continue;  // unseen out-of-space term
    logp[0] += v * log_likelihood_[0][t];
    logp[1] += v * log_likelihood_[1][t];
  }
  double m = std::max(logp[0], logp[1]);
  double e0 = std::exp(logp[0] - m), e1 = std::exp(logp[1] - m);
  double z = e0 + e1;
  return {e0 / z, e1 / z};
}

void MultinomialNaiveBayes::set_params(
    std::array<double, 2> log_prior,
    std::array<std::vector<double>, 2> log_likelihood) {
  log_prior_ = log_prior;
  log_likelihood_ = std::move(log_likelihood);
  fitted_ = true;
}

}  // namespace fnd
