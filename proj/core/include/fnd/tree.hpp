#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fnd/classifier.hpp"
#include "fnd/rng.hpp"

namespace fnd {

// Binary tree over sparse rows. Leaves carry the mean target of their
// training rows (class-1 fraction for classification trees, mean residual
// for boosted regression trees).
struct TreeNode {
  std::int32_t feature = -1;  // -1 => leaf
  double threshold = 0.0;
  double value = 0.0;
  std::unique_ptr<TreeNode> left, right;

  bool is_leaf() const { return feature < 0; }
};

double tree_value(const TreeNode& node, const FeatureVector& row);
int tree_depth(const TreeNode& node);

// Column-compressed view of a row set, built once per fit.
struct CscMatrix {
  std::uint32_t n_rows = 0;
  std::uint32_t n_cols = 0;
  std::vector<std::uint32_t> col_start;  // n_cols + 1
  std::vector<std::uint32_t> row_ids;
  std::vector<double> values;
};

CscMatrix build_csc(const std::vector<FeatureVector>& rows);

struct TreeOptions {
  int max_depth = 20;
  int min_leaf = 2;
};

// Exact greedy CART. Split candidates at midpoints of sorted unique
// feature values (implicit zeros included); a split must leave min_leaf
// rows on each side; ties (including zero-gain splits, which XOR-like
// targets need) break toward the lowest feature index, then the lowest
// threshold. With binary 0/1 targets the variance criterion used here
// coincides with Gini impurity. Growth stops at max_depth, purity, or
// when no candidate satisfies min_leaf.
std::unique_ptr<TreeNode> fit_tree(const CscMatrix& data,
                                   const std::vector<double>& targets,
                                   const std::vector<std::uint32_t>& rows,
                                   const TreeOptions& options);

// Same, but each node considers only `mtry` features sampled without
// replacement (random forest splits). `rows` must hold unique row ids;
// `weights` carries bootstrap multiplicities (parallel to `rows`).
std::unique_ptr<TreeNode> fit_tree_sampled(const CscMatrix& data,
                                           const std::vector<double>& targets,
                                           const std::vector<std::uint32_t>& rows,
                                           const std::vector<double>& weights,
                                           const TreeOptions& options, int mtry,
                                           Rng& rng);

struct TreeConfig {
  int max_depth = 20;
  int min_leaf = 2;
};

class DecisionTree : public ProbClassifier {
 public:
  explicit DecisionTree(TreeConfig config = {}) : config_(config) {}

  void fit(const std::vector<FeatureVector>& rows,
           const std::vector<int>& labels) override;
  std::array<double, 2> predict_proba(const FeatureVector& row) const override;

  const TreeConfig& config() const { return config_; }
  const TreeNode& root() const { return *root_; }
  void set_root(std::unique_ptr<TreeNode> root) { root_ = std::move(root); }

 private:
  TreeConfig config_;
  std::unique_ptr<TreeNode> root_;
};

}  // namespace fnd
