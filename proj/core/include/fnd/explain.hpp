#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fnd/corpus.hpp"
#include "fnd/scorer.hpp"

namespace fnd {

struct LimeConfig {
  int n_samples = 1000;
  double kernel_width = 25.0;  // sigma of exp(-d^2 / sigma^2)
  int top_k = 6;
  double ridge_lambda = 1.0;
  std::uint64_t seed = 0;
};

struct TokenWeight {
  std::string token;
  double weight = 0.0;  // positive pushes toward fake
};

struct Explanation {
  std::string article_id;
  int predicted_label = 0;
  double predicted_p_fake = 0.0;
  std::vector<TokenWeight> token_weights;  // sorted by |weight| desc, <= top_k
  double intercept = 0.0;
  double local_fidelity = 0.0;  // weighted R^2 of the surrogate
  LimeConfig config;
};

// Binary masks over the instance's m distinct tokens. The first mask is
// all-ones (the unperturbed instance); each further mask zeroes k
// positions, k uniform in {1..m}. Deterministic under config.seed.
std::vector<std::vector<std::uint8_t>> perturb_masks(std::size_t m,
                                                     const LimeConfig& config);

// Kernel weight of a mask: exp(-d^2 / sigma^2) with d the cosine distance
// to the all-ones mask (d = 1 for the all-zero mask).
double proximity(const std::vector<std::uint8_t>& mask, double sigma);

// Weighted ridge surrogate by normal equations; lambda is not applied to
// the intercept. Returns the m coefficients and the intercept.
struct Surrogate {
  std::vector<double> coefficients;
  double intercept = 0.0;
};
Surrogate fit_surrogate(const std::vector<std::vector<std::uint8_t>>& masks,
                        const std::vector<double>& targets,
                        const std::vector<double>& weights, double lambda);

// Weighted R^2 of the surrogate against the targets (1.0 when the target
// has zero weighted variance).
double surrogate_fidelity(const Surrogate& s,
                          const std::vector<std::vector<std::uint8_t>>& masks,
                          const std::vector<double>& targets,
                          const std::vector<double>& weights);

// Full LIME pipeline for one article: distinct tokens -> perturbations ->
// model probabilities (social context held fixed at the article's values)
// -> proximity-weighted surrogate -> top-k signed token weights.
Explanation explain(const ArticleScorer& model, const NewsArticle& article,
                    const LimeConfig& config = {});

enum class RenderFormat { kJson, kHtml, kText };
RenderFormat render_format_from_string(const std::string& s);
std::string render(const Explanation& e, RenderFormat format);

// Parses the JSON produced by render(kJson) back into an Explanation.
Explanation explanation_from_json(const std::string& json_text);

}  // namespace fnd
