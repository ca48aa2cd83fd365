#include "fnd/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "fnd/errors.hpp"
#include "fnd/sparse.hpp"

namespace fnd {

double tree_value(const TreeNode& node, const FeatureVector& row) {
  const TreeNode* cur = &node;
  while (!cur->is_leaf()) {
    double v = sparse_at(row, static_cast<std::uint32_t>(cur->feature));
    cur = v <= cur->threshold ? cur->left.get() : cur->right.get();
  }
  return cur->value;
}

int tree_depth(const TreeNode& node) {
  if (node.is_leaf()) return 0;
  return 1 + std::max(tree_depth(*node.left), tree_depth(*node.right));
}

CscMatrix build_csc(const std::vector<FeatureVector>& rows) {
  CscMatrix m;
  m.n_rows = static_cast<std::uint32_t>(rows.size());
  m.n_cols = rows.empty() ? 0 : rows.front().dimension;
  std::vector<std::uint32_t> counts(m.n_cols + 1, 0);
  std::size_t nnz = 0;
  for (const FeatureVector& r : rows) {
    for (std::uint32_t j : r.indices) counts[j + 1] += 1;
    nnz += r.indices.size();
  }
  m.col_start.resize(m.n_cols + 1, 0);
  for (std::uint32_t j = 0; j < m.n_cols; ++j)
    m.col_start[j + 1] = m.col_start[j] + counts[j + 1];
  m.row_ids.resize(nnz);
  m.values.resize(nnz);
  std::vector<std::uint32_t> cursor(m.col_start.begin(), m.col_start.end() - 1);
  for (std::uint32_t i = 0; i < rows.size(); ++i) {
    const FeatureVector& r = rows[i];
    for (std::size_t k = 0; k < r.indices.size(); ++k) {
      std::uint32_t j = r.indices[k];
      m.row_ids[cursor[j]] = i;
      m.values[cursor[j]] = r.values[k];
      ++cursor[j];
    }
  }
  return m;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SplitChoice {
  double score = kNegInf;  // sum over children of S^2 / W
  std::int32_t feature = -1;
  double threshold = 0.0;
};

struct Entry {
  double value;
  double wy;  // weight * target
  double w;
};

// Evaluates all candidate thresholds of one feature inside one node.
// `nonzero` holds the node rows with a nonzero feature value; the zero
// group is reconstructed from the node totals. Candidates are midpoints of
// consecutive distinct values; a candidate must leave min_leaf weight on
// both sides and strictly beat `best.score` (features are visited in
// ascending index and thresholds in ascending order, so ties keep the
// lowest feature/threshold).
void eval_feature_split(std::vector<Entry>& nonzero, double node_w,
                        double node_s, double min_leaf, std::int32_t feature,
                        SplitChoice& best) {
  double nz_w = 0, nz_s = 0;
  for (const Entry& e : nonzero) {
    nz_w += e.w;
    nz_s += e.wy;
  }
  double zero_w = node_w - nz_w;
  double zero_s = node_s - nz_s;
  if (zero_w > 0) nonzero.push_back({0.0, zero_s, zero_w});

  std::sort(nonzero.begin(), nonzero.end(),
            [](const Entry& a, const Entry& b) { return a.value < b.value; });

  // Aggregate into distinct values. Reuses a thread-local scratch buffer.
  static thread_local std::vector<Entry> distinct;
  distinct.clear();
  for (const Entry& e : nonzero) {
    if (!distinct.empty() && distinct.back().value == e.value) {
      distinct.back().wy += e.wy;
      distinct.back().w += e.w;
    } else {
      distinct.push_back(e);
    }
  }
  if (distinct.size() < 2) return;

  double left_w = 0, left_s = 0;
  for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
    left_w += distinct[k].w;
    left_s += distinct[k].wy;
    double right_w = node_w - left_w;
    double right_s = node_s - left_s;
    if (left_w < min_leaf || right_w < min_leaf) continue;
    double mid = 0.5 * (distinct[k].value + distinct[k + 1].value);
    if (!(mid < distinct[k + 1].value)) continue;  // fp-degenerate gap
    double score = left_s * left_s / left_w + right_s * right_s / right_w;
    if (score > best.score) {
      best.score = score;
      best.feature = feature;
      best.threshold = mid;
    }
  }
}

struct NodeState {
  TreeNode* node;
  std::vector<std::uint32_t> rows;  // row ids
  double w = 0;                     // total weight
  double s = 0;                     // total weighted target
  double mn = 0, mx = 0;            // target range (purity check)
  int depth = 0;
};

void node_stats(const std::vector<double>& targets,
                const std::vector<std::uint32_t>& rows,
                const double* weights_by_row, NodeState& st) {
  st.w = st.s = 0;
  st.mn = std::numeric_limits<double>::infinity();
  st.mx = -st.mn;
  for (std::uint32_t r : rows) {
    double w = weights_by_row ? weights_by_row[r] : 1.0;
    double y = targets[r];
    st.w += w;
    st.s += w * y;
    st.mn = std::min(st.mn, y);
    st.mx = std::max(st.mx, y);
  }
}

bool splittable(const NodeState& st, const TreeOptions& opt) {
  return st.depth < opt.max_depth && st.w >= 2.0 * opt.min_leaf &&
         st.mn < st.mx;
}

// Partitions node rows on (feature, threshold) using one pass over the
// feature's column. `slot_of_row` marks node membership.
void partition_rows(const CscMatrix& data, const NodeState& st,
                    std::int32_t feature, double threshold,
                    const std::vector<std::int32_t>& slot_of_row,
                    std::int32_t slot, std::vector<std::uint32_t>& left,
                    std::vector<std::uint32_t>& right) {
  std::unordered_map<std::uint32_t, double> nz;
  nz.reserve(64);
  for (std::uint32_t k = data.col_start[feature];
       k < data.col_start[feature + 1]; ++k) {
    if (slot_of_row[data.row_ids[k]] == slot)
      nz.emplace(data.row_ids[k], data.values[k]);
  }
  for (std::uint32_t r : st.rows) {
    auto it = nz.find(r);
    double v = it == nz.end() ? 0.0 : it->second;
    (v <= threshold ? left : right).push_back(r);
  }
}

}  // namespace

std::unique_ptr<TreeNode> fit_tree(const CscMatrix& data,
                                   const std::vector<double>& targets,
                                   const std::vector<std::uint32_t>& rows,
                                   const TreeOptions& options) {
  if (rows.empty()) throw ArgumentError("fit_tree requires at least one row");
  auto root = std::make_unique<TreeNode>();

  std::vector<std::int32_t> slot_of_row(data.n_rows, -1);
  std::vector<NodeState> level;
  {
    NodeState st;
    st.node = root.get();
    st.rows = rows;
    st.depth = 0;
    node_stats(targets, st.rows, nullptr, st);
    level.push_back(std::move(st));
  }

  while (!level.empty()) {
    const std::size_t n_nodes = level.size();
    std::vector<char> can_split(n_nodes);
    std::vector<SplitChoice> best(n_nodes);
    bool any = false;
    for (std::size_t s = 0; s < n_nodes; ++s) {
      level[s].node->value = level[s].s / level[s].w;
      can_split[s] = splittable(level[s], options);
      if (can_split[s]) {
        for (std::uint32_t r : level[s].rows)
          slot_of_row[r] = static_cast<std::int32_t>(s);
        any = true;
      }
    }
    if (!any) break;

    // One sweep over every column, bucketing entries by node.
    std::vector<std::vector<Entry>> buf(n_nodes);
    std::vector<std::uint32_t> dirty;
    for (std::uint32_t j = 0; j < data.n_cols; ++j) {
      dirty.clear();
      for (std::uint32_t k = data.col_start[j]; k < data.col_start[j + 1];
           ++k) {
        std::int32_t s = slot_of_row[data.row_ids[k]];
        if (s < 0 || !can_split[s]) continue;
        if (buf[s].empty()) dirty.push_back(s);
        buf[s].push_back({data.values[k], targets[data.row_ids[k]], 1.0});
      }
      for (std::uint32_t s : dirty) {
        eval_feature_split(buf[s], level[s].w, level[s].s, options.min_leaf,
                           static_cast<std::int32_t>(j), best[s]);
        buf[s].clear();
      }
      // A node whose rows all have zero in column j still gets candidates
      // only if some row is nonzero, which is correct: an all-zero column
      // is constant within the node.
    }

    std::vector<NodeState> next;
    for (std::size_t s = 0; s < n_nodes; ++s) {
      for (std::uint32_t r : level[s].rows) slot_of_row[r] = -1;
      if (!can_split[s] || best[s].feature < 0) continue;
      NodeState& st = level[s];
      // Restore membership for the partition pass.
      for (std::uint32_t r : st.rows) slot_of_row[r] = static_cast<std::int32_t>(s);
      NodeState l, rgt;
      partition_rows(data, st, best[s].feature, best[s].threshold, slot_of_row,
                     static_cast<std::int32_t>(s), l.rows, rgt.rows);
      for (std::uint32_t r : st.rows) slot_of_row[r] = -1;
      st.node->feature = best[s].feature;
      st.node->threshold = best[s].threshold;
      st.node->left = std::make_unique<TreeNode>();
      st.node->right = std::make_unique<TreeNode>();
      l.node = st.node->left.get();
      rgt.node = st.node->right.get();
      l.depth = rgt.depth = st.depth + 1;
      node_stats(targets, l.rows, nullptr, l);
      node_stats(targets, rgt.rows, nullptr, rgt);
      next.push_back(std::move(l));
      next.push_back(std::move(rgt));
    }
    level = std::move(next);
  }
  return root;
}

namespace {

void fit_sampled_node(const CscMatrix& data, const std::vector<double>& targets,
                      const std::vector<double>& weights_by_row,
                      std::vector<std::int32_t>& slot_of_row, TreeNode* node,
                      NodeState&& st, const TreeOptions& options, int mtry,
                      Rng& rng) {
  node->value = st.s / st.w;
  if (!splittable(st, options)) return;

  // Sample mtry distinct feature indices; evaluate in ascending order so
  // tie-breaking matches the exhaustive trainer.
  std::vector<std::uint32_t> sample;
  if (static_cast<std::uint32_t>(mtry) >= data.n_cols) {
    sample.resize(data.n_cols);
    for (std::uint32_t j = 0; j < data.n_cols; ++j) sample[j] = j;
  } else {
    std::unordered_set<std::uint32_t> chosen;
    chosen.reserve(mtry * 2);
    while (chosen.size() < static_cast<std::size_t>(mtry))
      chosen.insert(static_cast<std::uint32_t>(rng.uniform_int(data.n_cols)));
    sample.assign(chosen.begin(), chosen.end());
    std::sort(sample.begin(), sample.end());
  }

  for (std::uint32_t r : st.rows) slot_of_row[r] = 1;
  SplitChoice best;
  std::vector<Entry> buf;
  for (std::uint32_t j : sample) {
    buf.clear();
    for (std::uint32_t k = data.col_start[j]; k < data.col_start[j + 1]; ++k) {
      std::uint32_t r = data.row_ids[k];
      if (slot_of_row[r] == 1)
        buf.push_back({data.values[k], targets[r] * weights_by_row[r],
                       weights_by_row[r]});
    }
    if (!buf.empty())
      eval_feature_split(buf, st.w, st.s, options.min_leaf,
                         static_cast<std::int32_t>(j), best);
  }

  if (best.feature < 0) {
    for (std::uint32_t r : st.rows) slot_of_row[r] = -1;
    return;
  }
  NodeState l, rgt;
  partition_rows(data, st, best.feature, best.threshold, slot_of_row, 1,
                 l.rows, rgt.rows);
  for (std::uint32_t r : st.rows) slot_of_row[r] = -1;
  st.rows.clear();
  st.rows.shrink_to_fit();

  node->feature = best.feature;
  node->threshold = best.threshold;
  node->left = std::make_unique<TreeNode>();
  node->right = std::make_unique<TreeNode>();
  l.depth = rgt.depth = st.depth + 1;
  node_stats(targets, l.rows, weights_by_row.data(), l);
  node_stats(targets, rgt.rows, weights_by_row.data(), rgt);
  fit_sampled_node(data, targets, weights_by_row, slot_of_row, node->left.get(),
                   std::move(l), options, mtry, rng);
  fit_sampled_node(data, targets, weights_by_row, slot_of_row,
                   node->right.get(), std::move(rgt), options, mtry, rng);
}

}  // namespace

std::unique_ptr<TreeNode> fit_tree_sampled(const CscMatrix& data,
                                           const std::vector<double>& targets,
                                           const std::vector<std::uint32_t>& rows,
                                           const std::vector<double>& weights,
                                           const TreeOptions& options, int mtry,
                                           Rng& rng) {
  if (rows.empty())
    throw ArgumentError("fit_tree_sampled requires at least one row");
  if (rows.size() != weights.size())
    throw ArgumentError("rows/weights size mismatch");
  std::vector<double> weights_by_row(data.n_rows, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    weights_by_row[rows[i]] += weights[i];

  auto root = std::make_unique<TreeNode>();
  std::vector<std::int32_t> slot_of_row(data.n_rows, -1);
  NodeState st;
  st.node = root.get();
  st.rows = rows;
  st.depth = 0;
  node_stats(targets, st.rows, weights_by_row.data(), st);
  fit_sampled_node(data, targets, weights_by_row, slot_of_row, root.get(),
                   std::move(st), options, mtry, rng);
  return root;
}

void DecisionTree::fit(const std::vector<FeatureVector>& rows,
                       const std::vector<int>& labels) {
  if (rows.empty()) throw ArgumentError("DecisionTree::fit requires rows");
  if (rows.size() != labels.size())
    throw ArgumentError("rows/labels size mismatch");
  CscMatrix csc = build_csc(rows);
  std::vector<double> targets(labels.begin(), labels.end());
  std::vector<std::uint32_t> ids(rows.size());
  for (std::uint32_t i = 0; i < rows.size(); ++i) ids[i] = i;
  TreeOptions opt{config_.max_depth, config_.min_leaf};
  root_ = fit_tree(csc, targets, ids, opt);
}

std::array<double, 2> DecisionTree::predict_proba(
    const FeatureVector& row) const {
  if (!root_) throw StateError("DecisionTree is not fitted");
  double p = tree_value(*root_, row);
  p = std::clamp(p, 0.0, 1.0);
  return {1.0 - p, p};
}

}  // namespace fnd
