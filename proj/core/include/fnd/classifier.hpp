#pragma once

#include <array>
#include <vector>

#include "fnd/features.hpp"

namespace fnd {

// Binary probabilistic classifier over sparse rows. Probabilities are
// finite, lie in [0, 1] and sum to 1 within 1e-9; predict() is the argmax
// with ties resolved toward label 0 (real).
class ProbClassifier {
 public:
  virtual ~ProbClassifier() = default;

  virtual void fit(const std::vector<FeatureVector>& rows,
                   const std::vector<int>& labels) = 0;
  virtual std::array<double, 2> predict_proba(
      const FeatureVector& row) const = 0;

  int predict(const FeatureVector& row) const {
    auto p = predict_proba(row);
    return p[1] > p[0] ? 1 : 0;
  }
};

}  // namespace fnd
