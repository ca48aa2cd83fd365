#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "fnd/features.hpp"

namespace fnd {

// w . x for dense w and sparse x.
inline double sparse_dot(std::span<const double> w, const FeatureVector& x) {
  double s = 0;
  for (std::size_t k = 0; k < x.indices.size(); ++k)
    s += w[x.indices[k]] * x.values[k];
  return s;
}

// w += alpha * x.
inline void sparse_axpy(std::vector<double>& w, double alpha,
                        const FeatureVector& x) {
  for (std::size_t k = 0; k < x.indices.size(); ++k)
    w[x.indices[k]] += alpha * x.values[k];
}

// x[j], exploiting sorted indices.
inline double sparse_at(const FeatureVector& x, std::uint32_t j) {
  auto it = std::lower_bound(x.indices.begin(), x.indices.end(), j);
  if (it != x.indices.end() && *it == j)
    return x.values[static_cast<std::size_t>(it - x.indices.begin())];
  return 0.0;
}

}  // namespace fnd
