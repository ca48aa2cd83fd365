#include "fnd/gbdt.hpp"

#include <algorithm>
#include <cmath>

#include "fnd/errors.hpp"
#include "fnd/linear.hpp"

namespace fnd {

void GradientBoostedTrees::fit(const std::vector<FeatureVector>& rows,
                               const std::vector<int>& labels) {
  if (config_.n_rounds < 1) throw ArgumentError("GBDT needs n_rounds >= 1");
  if (rows.empty()) throw ArgumentError("GBDT fit requires rows");
  if (rows.size() != labels.size())
    throw ArgumentError("rows/labels size mismatch");
  const std::size_t n = rows.size();

  double prior = 0;
  for (int y : labels) prior += y;
  prior /= static_cast<double>(n);

  trees_.clear();
  training_loss_.clear();
  if (prior <= 0.0 || prior >= 1.0) {
    // Single-class labels: degenerate constant-prior model, no boosting.
    initial_log_odds_ = prior <= 0.0 ? -30.0 : 30.0;
    fitted_ = true;
    return;
  }
  initial_log_odds_ = std::log(prior / (1.0 - prior));

  const CscMatrix csc = build_csc(rows);
  std::vector<std::uint32_t> ids(n);
  for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
  TreeOptions opt{config_.max_depth, config_.min_leaf};

  std::vector<double> score(n, initial_log_odds_);
  std::vector<double> residual(n);
  auto log_loss = [&] {
    double loss = 0;
    for (std::size_t i = 0; i < n; ++i)
      loss += log1p_exp(score[i]) - labels[i] * score[i];
    return loss / static_cast<double>(n);
  };
  for (int round = 0; round < config_.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i)
      residual[i] = labels[i] - sigmoid(score[i]);
    auto tree = fit_tree(csc, residual, ids, opt);
    for (std::size_t i = 0; i < n; ++i)
      score[i] += config_.learning_rate * tree_value(*tree, rows[i]);
    trees_.push_back(std::move(tree));
    double loss = log_loss();
    if (!std::isfinite(loss))
      throw TrainingError("GBDT: non-finite loss at round " +
                          std::to_string(round + 1));
    training_loss_.push_back(loss);
  }
  fitted_ = true;
}

double GradientBoostedTrees::decision(const FeatureVector& row) const {
  double s = initial_log_odds_;
  for (const auto& t : trees_)
    s += config_.learning_rate * tree_value(*t, row);
  return s;
}

std::array<double, 2> GradientBoostedTrees::predict_proba(
    const FeatureVector& row) const {
  if (!fitted_) throw StateError("GBDT is not fitted");
  double p = sigmoid(decision(row));
  return {1.0 - p, p};
}

void GradientBoostedTrees::set_params(
    double initial_log_odds, std::vector<std::unique_ptr<TreeNode>> trees) {
  initial_log_odds_ = initial_log_odds;
  trees_ = std::move(trees);
  fitted_ = true;
}

}  // namespace fnd
