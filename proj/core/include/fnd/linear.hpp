#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "fnd/classifier.hpp"

namespace fnd {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Numerically safe -log(sigmoid(z)) pieces: log(1 + exp(z)).
double log1p_exp(double z);

struct LogRegConfig {
  double learning_rate = 0.1;
  double l2 = 1e-4;
  int epochs = 50;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

// Full-batch loss/gradient of L2-regularized logistic log loss; exposed so
// gradients can be checked against finite differences.
double logreg_loss(std::span<const double> w, double b,
                   const std::vector<FeatureVector>& rows,
                   const std::vector<int>& labels, double l2);
void logreg_gradient(std::span<const double> w, double b,
                     const std::vector<FeatureVector>& rows,
                     const std::vector<int>& labels, double l2,
                     std::vector<double>& grad_w, double& grad_b);

class LogisticRegression : public ProbClassifier {
 public:
  explicit LogisticRegression(LogRegConfig config = {}) : config_(config) {}

  void fit(const std::vector<FeatureVector>& rows,
           const std::vector<int>& labels) override;
  std::array<double, 2> predict_proba(const FeatureVector& row) const override;

  const LogRegConfig& config() const { return config_; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  void set_params(std::vector<double> w, double b);

 private:
  LogRegConfig config_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  bool fitted_ = false;
};

struct SvmConfig {
  double learning_rate = 0.05;
  double l2 = 1e-4;
  int epochs = 50;
  int batch_size = 32;
  double calibration_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Platt calibration: fits p(y=1|m) = sigmoid(a*m + b) on (margin, label)
// pairs with the usual smoothed targets, by damped Newton iteration.
// Returns {a, b}.
std::array<double, 2> platt_fit(const std::vector<double>& margins,
                                const std::vector<int>& labels);

// Linear SVM trained by mini-batch subgradient descent on hinge loss with
// L2 regularization. Probabilities come from Platt scaling fitted on a
// held-out calibration slice of the training rows; if the slice is
// single-class the model falls back to a clipped sigmoid of the margin.
class LinearSvm : public ProbClassifier {
 public:
  explicit LinearSvm(SvmConfig config = {}) : config_(config) {}

  void fit(const std::vector<FeatureVector>& rows,
           const std::vector<int>& labels) override;
  std::array<double, 2> predict_proba(const FeatureVector& row) const override;

  double margin(const FeatureVector& row) const;

  const SvmConfig& config() const { return config_; }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  bool calibrated() const { return calibrated_; }
  std::array<double, 2> platt() const { return {platt_a_, platt_b_}; }
  void set_params(std::vector<double> w, double b, bool calibrated,
                  double platt_a, double platt_b);

 private:
  SvmConfig config_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  double platt_a_ = 1.0;
  double platt_b_ = 0.0;
  bool calibrated_ = false;
  bool fitted_ = false;
};

}  // namespace fnd
