#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fnd/tree.hpp"

namespace fnd {

struct GbdtConfig {
  int n_rounds = 200;
  double learning_rate = 0.1;
  int max_depth = 3;
  int min_leaf = 2;
};

// First-order gradient boosting with logistic loss: depth-limited
// regression trees are fit stagewise to the residuals y - p, leaves carry
// mean residuals, and the score starts from the class-prior log odds.
// prediction = sigmoid(initial + lr * sum of tree outputs).
class GradientBoostedTrees : public ProbClassifier {
 public:
  explicit GradientBoostedTrees(GbdtConfig config = {}) : config_(config) {}

  void fit(const std::vector<FeatureVector>& rows,
           const std::vector<int>& labels) override;
  std::array<double, 2> predict_proba(const FeatureVector& row) const override;

  double decision(const FeatureVector& row) const;  // raw log-odds score

  const GbdtConfig& config() const { return config_; }
  double initial_log_odds() const { return initial_log_odds_; }
  const std::vector<std::unique_ptr<TreeNode>>& trees() const { return trees_; }
  // Per-round training log loss (non-increasing).
  const std::vector<double>& training_loss() const { return training_loss_; }
  void set_params(double initial_log_odds,
                  std::vector<std::unique_ptr<TreeNode>> trees);

 private:
  GbdtConfig config_;
  double initial_log_odds_ = 0.0;
  std::vector<std::unique_ptr<TreeNode>> trees_;
  std::vector<double> training_loss_;
  bool fitted_ = false;
};

}  // namespace fnd
