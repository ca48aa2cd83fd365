#include "fnd/forest.hpp"

#include <algorithm>
#include <cmath>

#include "fnd/errors.hpp"
#include "fnd/parallel.hpp"
#include "fnd/rng.hpp"

namespace fnd {

void RandomForest::fit(const std::vector<FeatureVector>& rows,
                       const std::vector<int>& labels) {
  if (config_.n_trees < 1) throw ArgumentError("forest needs n_trees >= 1");
  if (rows.empty()) throw ArgumentError("forest fit requires rows");
  if (rows.size() != labels.size())
    throw ArgumentError("rows/labels size mismatch");

  const CscMatrix csc = build_csc(rows);
  const std::vector<double> targets(labels.begin(), labels.end());
  const std::uint32_t n = csc.n_rows;
  int mtry = config_.mtry;
  if (mtry <= 0)
    mtry = std::max(1, static_cast<int>(std::floor(std::sqrt(
                           static_cast<double>(csc.n_cols)))));

  Rng master(config_.seed);
  std::vector<std::uint64_t> tree_seeds(config_.n_trees);
  for (auto& s : tree_seeds) s = master.fork_seed();

  trees_.clear();
  trees_.resize(config_.n_trees);
  TreeOptions opt{config_.max_depth, config_.min_leaf};
  parallel_for(trees_.size(), [&](std::size_t t) {
    Rng rng(tree_seeds[t]);
    std::vector<std::uint32_t> ids;
    std::vector<double> weights;
    if (config_.bootstrap) {
      std::vector<double> mult(n, 0.0);
      for (std::uint32_t i = 0; i < n; ++i)
        mult[rng.uniform_int(n)] += 1.0;
      for (std::uint32_t i = 0; i < n; ++i) {
        if (mult[i] > 0) {
          ids.push_back(i);
          weights.push_back(mult[i]);
        }
      }
    } else {
      ids.resize(n);
      for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
      weights.assign(n, 1.0);
    }
    trees_[t] = fit_tree_sampled(csc, targets, ids, weights, opt, mtry, rng);
  });
}

std::array<double, 2> RandomForest::predict_proba(
    const FeatureVector& row) const {
  if (trees_.empty()) throw StateError("random forest is not fitted");
  double p = 0;
  for (const auto& t : trees_) p += std::clamp(tree_value(*t, row), 0.0, 1.0);
  p /= static_cast<double>(trees_.size());
  return {1.0 - p, p};
}

void RandomForest::set_trees(std::vector<std::unique_ptr<TreeNode>> trees) {
  trees_ = std::move(trees);
}

}  // namespace fnd
