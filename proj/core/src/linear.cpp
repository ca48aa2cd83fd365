#include "fnd/linear.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "fnd/errors.hpp"
#include "fnd/rng.hpp"
#include "fnd/sparse.hpp"

namespace fnd {

double log1p_exp(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double logreg_loss(std::span<const double> w, double b,
                   const std::vector<FeatureVector>& rows,
                   const std::vector<int>& labels, double l2) {
  double loss = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double z = sparse_dot(w, rows[i]) + b;
    // -y log p - (1-y) log(1-p) = log(1+e^z) - y z
    loss += log1p_exp(z) - labels[i] * z;
  }
  loss /= static_cast<double>(rows.size());
  double reg = 0;
  for (double v : w) reg += v * v;
  return loss + 0.5 * l2 * reg;
}

void logreg_gradient(std::span<const double> w, double b,
                     const std::vector<FeatureVector>& rows,
                     const std::vector<int>& labels, double l2,
                     std::vector<double>& grad_w, double& grad_b) {
  grad_w.assign(w.size(), 0.0);
  grad_b = 0.0;
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double err = sigmoid(sparse_dot(w, rows[i]) + b) - labels[i];
    sparse_axpy(grad_w, err * inv_n, rows[i]);
    grad_b += err * inv_n;
  }
  for (std::size_t j = 0; j < w.size(); ++j) grad_w[j] += l2 * w[j];
}

namespace {

// Shared mini-batch loop for the two linear models. grad_fn(i, scale)
// accumulates the data gradient of row i into (gw, gb) with weight scale.
template <typename PointGrad>
void sgd_train(const std::vector<FeatureVector>& rows,
               const std::vector<int>& labels, double lr, double l2,
               int epochs, int batch_size, std::uint64_t seed,
               std::vector<double>& w, double& b, PointGrad&& point_grad,
               const char* what) {
  const std::size_t n = rows.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  std::vector<double> gw(w.size());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch_size) {
      std::size_t end = std::min(n, start + batch_size);
      double scale = 1.0 / static_cast<double>(end - start);
      std::fill(gw.begin(), gw.end(), 0.0);
      double gb = 0.0;
      for (std::size_t k = start; k < end; ++k)
        point_grad(order[k], scale, gw, gb);
      for (std::size_t j = 0; j < w.size(); ++j)
        w[j] -= lr * (gw[j] + l2 * w[j]);
      b -= lr * gb;
    }
    // Divergence check once per epoch; the stable loss form only goes
    // non-finite if the parameters themselves blew up.
    double probe = b;
    for (double v : w) probe += v;
    if (!std::isfinite(probe))
      throw TrainingError(std::string(what) +
                          ": non-finite parameters after epoch " +
                          std::to_string(epoch + 1));
  }
}

}  // namespace

void LogisticRegression::fit(const std::vector<FeatureVector>& rows,
                             const std::vector<int>& labels) {
  if (rows.empty()) throw ArgumentError("logistic regression fit requires rows");
  if (rows.size() != labels.size())
    throw ArgumentError("rows/labels size mismatch");
  weights_.assign(rows.front().dimension, 0.0);
  bias_ = 0.0;
  sgd_train(
      rows, labels, config_.learning_rate, config_.l2, config_.epochs,
      config_.batch_size, config_.seed, weights_, bias_,
      [&](std::size_t i, double scale, std::vector<double>& gw, double& gb) {
        double err = sigmoid(sparse_dot(weights_, rows[i]) + bias_) - labels[i];
        sparse_axpy(gw, err * scale, rows[i]);
        gb += err * scale;
      },
      "logistic regression");
  double loss = logreg_loss(weights_, bias_, rows, labels, config_.l2);
  if (!std::isfinite(loss))
    throw TrainingError("logistic regression: non-finite final loss");
  fitted_ = true;
}

std::array<double, 2> LogisticRegression::predict_proba(
    const FeatureVector& row) const {
  if (!fitted_) throw StateError("logistic regression is not fitted");
  double p = sigmoid(sparse_dot(weights_, row) + bias_);
  return {1.0 - p, p};
}

void LogisticRegression::set_params(std::vector<double> w, double b) {
  weights_ = std::move(w);
  bias_ = b;
  fitted_ = true;
}

std::array<double, 2> platt_fit(const std::vector<double>& margins,
                                const std::vector<int>& labels) {
  // Smoothed targets as in Platt's original method.
  double n_pos = 0, n_neg = 0;
  for (int y : labels) (y == 1 ? n_pos : n_neg) += 1;
  const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
  const double t_neg = 1.0 / (n_neg + 2.0);

  double a = 0.0;
  double b = std::log((n_pos + 1.0) / (n_neg + 1.0));
  const std::size_t n = margins.size();
  auto objective = [&](double aa, double bb) {
    double f = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double t = labels[i] == 1 ? t_pos : t_neg;
      double z = aa * margins[i] + bb;
      // cross-entropy of sigmoid(z) against target t
      f += log1p_exp(z) - t * z;
    }
    return f;
  };
  double fval = objective(a, b);
  for (int iter = 0; iter < 100; ++iter) {
    double g_a = 0, g_b = 0, h_aa = 0, h_ab = 0, h_bb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double t = labels[i] == 1 ? t_pos : t_neg;
      double p = sigmoid(a * margins[i] + b);
      double err = p - t;
      double w = std::max(p * (1 - p), 1e-12);
      g_a += err * margins[i];
      g_b += err;
      h_aa += w * margins[i] * margins[i];
      h_ab += w * margins[i];
      h_bb += w;
    }
    double grad_norm = std::abs(g_a) + std::abs(g_b);
    if (grad_norm < 1e-10) break;
    // Solve the 2x2 Newton system with a small ridge for safety.
    h_aa += 1e-12;
    h_bb += 1e-12;
    double det = h_aa * h_bb - h_ab * h_ab;
    double da = -(h_bb * g_a - h_ab * g_b) / det;
    double db = -(h_aa * g_b - h_ab * g_a) / det;
    double step = 1.0;
    for (int halvings = 0; halvings < 32; ++halvings) {
      double fnew = objective(a + step * da, b + step * db);
      if (fnew <= fval + 1e-12) {
        a += step * da;
        b += step * db;
        fval = fnew;
        break;
      }
      step *= 0.5;
    }
  }
  return {a, b};
}

void LinearSvm::fit(const std::vector<FeatureVector>& rows,
                    const std::vector<int>& labels) {
  if (rows.empty()) throw ArgumentError("SVM fit requires rows");
  if (rows.size() != labels.size())
    throw ArgumentError("rows/labels size mismatch");

  // Deterministic stratified calibration holdout.
  Rng rng(config_.seed ^ 0xCA11B7A7E5ULL);
  std::array<std::vector<std::size_t>, 2> by_label;
  for (std::size_t i = 0; i < rows.size(); ++i)
    by_label[labels[i] == 1 ? 1 : 0].push_back(i);
  std::vector<std::size_t> train_idx, calib_idx;
  for (auto& idx : by_label) {
    rng.shuffle(idx);
    std::size_t n_cal =
        static_cast<std::size_t>(std::floor(config_.calibration_fraction *
                                            static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < n_cal ? calib_idx : train_idx).push_back(idx[i]);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(calib_idx.begin(), calib_idx.end());
  if (train_idx.empty()) train_idx.swap(calib_idx);

  std::vector<FeatureVector> train_rows;
  std::vector<int> train_labels;
  train_rows.reserve(train_idx.size());
  for (std::size_t i : train_idx) {
    train_rows.push_back(rows[i]);
    train_labels.push_back(labels[i]);
  }

  weights_.assign(rows.front().dimension, 0.0);
  bias_ = 0.0;
  sgd_train(
      train_rows, train_labels, config_.learning_rate, config_.l2,
      config_.epochs, config_.batch_size, config_.seed, weights_, bias_,
      [&](std::size_t i, double scale, std::vector<double>& gw, double& gb) {
        double y = train_labels[i] == 1 ? 1.0 : -1.0;
        double m = y * (sparse_dot(weights_, train_rows[i]) + bias_);
        if (m < 1.0) {
          sparse_axpy(gw, -y * scale, train_rows[i]);
          gb += -y * scale;
        }
      },
      "linear SVM");

  // Calibration.
  bool has_pos = false, has_neg = false;
  for (std::size_t i : calib_idx) (labels[i] == 1 ? has_pos : has_neg) = true;
  if (!calib_idx.empty() && has_pos && has_neg) {
    std::vector<double> margins;
    std::vector<int> calib_labels;
    margins.reserve(calib_idx.size());
    for (std::size_t i : calib_idx) {
      margins.push_back(margin(rows[i]));
      calib_labels.push_back(labels[i]);
    }
    auto ab = platt_fit(margins, calib_labels);
    platt_a_ = ab[0];
    platt_b_ = ab[1];
    calibrated_ = true;
  } else {
    std::cerr << "warning: SVM calibration split is degenerate; "
                 "falling back to sigmoid of the raw margin\n";
    platt_a_ = 1.0;
    platt_b_ = 0.0;
    calibrated_ = false;
  }
  fitted_ = true;
}

double LinearSvm::margin(const FeatureVector& row) const {
  return sparse_dot(weights_, row) + bias_;
}

std::array<double, 2> LinearSvm::predict_proba(const FeatureVector& row) const {
  if (!fitted_) throw StateError("SVM is not fitted");
  double m = margin(row);
  double p;
  if (calibrated_) {
    p = sigmoid(platt_a_ * m + platt_b_);
  } else {
    p = sigmoid(std::clamp(m, -30.0, 30.0));
  }
  return {1.0 - p, p};
}

void LinearSvm::set_params(std::vector<double> w, double b, bool calibrated,
                           double platt_a, double platt_b) {
  weights_ = std::move(w);
  bias_ = b;
  calibrated_ = calibrated;
  platt_a_ = platt_a;
  platt_b_ = platt_b;
  fitted_ = true;
}

}  // namespace fnd
