#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fnd/tree.hpp"

namespace fnd {

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 12;
  int min_leaf = 2;
  bool bootstrap = true;
  int mtry = 0;  // 0 => floor(sqrt(dimension))
  std::uint64_t seed = 0;
};

// Random forest: bootstrap-sampled trees with per-split feature
// subsampling; probability is the mean of the tree leaf fractions.
// Per-tree seeds are forked up front, so tree fitting may run in parallel
// without changing the result.
class RandomForest : public ProbClassifier {
 public:
  explicit RandomForest(ForestConfig config = {}) : config_(config) {}

  void fit(const std::vector<FeatureVector>& rows,
           const std::vector<int>& labels) override;
  std::array<double, 2> predict_proba(const FeatureVector& row) const override;

  const ForestConfig& config() const { return config_; }
  const std::vector<std::unique_ptr<TreeNode>>& trees() const { return trees_; }
  void set_trees(std::vector<std::unique_ptr<TreeNode>> trees);

 private:
  ForestConfig config_;
  std::vector<std::unique_ptr<TreeNode>> trees_;
};

}  // namespace fnd
