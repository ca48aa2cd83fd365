#include "fnd/explain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fnd/errors.hpp"
#include "fnd/features.hpp"
#include "fnd/parallel.hpp"
#include "fnd/rng.hpp"

namespace fnd {

using ordered_json = nlohmann::ordered_json;

std::vector<std::vector<std::uint8_t>> perturb_masks(std::size_t m,
                                                     const LimeConfig& config) {
  if (m < 1) throw ArgumentError("perturb_masks: need at least one token");
  if (config.n_samples < 10)
    throw ArgumentError("LIME needs n_samples >= 10");
  std::vector<std::vector<std::uint8_t>> masks;
  masks.reserve(config.n_samples);
  masks.emplace_back(m, std::uint8_t{1});  // identity perturbation first
  Rng rng(config.seed);
  std::vector<std::size_t> positions(m);
  for (std::size_t i = 0; i < m; ++i) positions[i] = i;
  for (int s = 1; s < config.n_samples; ++s) {
    std::vector<std::uint8_t> mask(m, 1);
    auto k = static_cast<std::size_t>(rng.uniform_range(1, static_cast<std::int64_t>(m)));
    // Partial Fisher-Yates: the first k entries become the zeroed set.
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(m - i));
      std::swap(positions[i], positions[j]);
      mask[positions[i]] = 0;
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

double proximity(const std::vector<std::uint8_t>& mask, double sigma) {
  if (mask.empty()) throw ArgumentError("proximity: empty mask");
  double ones = 0;
  for (std::uint8_t b : mask) ones += b;
  double d;
  if (ones == 0) {
    d = 1.0;  // cosine distance to the all-ones vector is undefined; fix at 1
  } else {
    double cos_sim = ones / (std::sqrt(ones) *
                             std::sqrt(static_cast<double>(mask.size())));
    d = 1.0 - cos_sim;
  }
  return std::exp(-(d * d) / (sigma * sigma));
}

namespace {

// Cholesky solve of the SPD system A x = b (A row-major n x n, destroyed).
std::vector<double> cholesky_solve(std::vector<double>& a,
                                   std::vector<double> b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (s <= 0)
          throw TrainingError("surrogate system is not positive definite");
        a[i * n + i] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
  }
  // forward: L y = b
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  // backward: L^T x = y
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
    b[i] = s / a[i * n + i];
  }
  return b;
}

}  // namespace

Surrogate fit_surrogate(const std::vector<std::vector<std::uint8_t>>& masks,
                        const std::vector<double>& targets,
                        const std::vector<double>& weights, double lambda) {
  if (masks.empty()) throw ArgumentError("fit_surrogate: no samples");
  if (masks.size() != targets.size() || masks.size() != weights.size())
    throw ArgumentError("fit_surrogate: size mismatch");
  const std::size_t m = masks.front().size();
  const std::size_t n = m + 1;  // + intercept (last column)

  // Normal equations: (X^T W X + lambda I') beta = X^T W y, with the
  // intercept left unpenalized.
  std::vector<double> a(n * n, 0.0), b(n, 0.0);
  std::vector<double> xi(n, 1.0);
  for (std::size_t s = 0; s < masks.size(); ++s) {
    const double w = weights[s];
    for (std::size_t j = 0; j < m; ++j) xi[j] = masks[s][j];
    xi[m] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (xi[i] == 0.0) continue;
      const double wxi = w * xi[i];
      for (std::size_t j = 0; j <= i; ++j) a[i * n + j] += wxi * xi[j];
      b[i] += wxi * targets[s];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a[i * n + j] = a[j * n + i];
  for (std::size_t j = 0; j < m; ++j) a[j * n + j] += lambda;

  std::vector<double> beta = cholesky_solve(a, std::move(b), n);
  Surrogate s;
  s.coefficients.assign(beta.begin(), beta.begin() + m);
  s.intercept = beta[m];
  return s;
}

double surrogate_fidelity(const Surrogate& s,
                          const std::vector<std::vector<std::uint8_t>>& masks,
                          const std::vector<double>& targets,
                          const std::vector<double>& weights) {
  double wsum = 0, mean = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    wsum += weights[i];
    mean += weights[i] * targets[i];
  }
  mean /= wsum;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    double pred = s.intercept;
    for (std::size_t j = 0; j < s.coefficients.size(); ++j)
      if (masks[i][j]) pred += s.coefficients[j];
    double dr = targets[i] - pred;
    double dt = targets[i] - mean;
    ss_res += weights[i] * dr * dr;
    ss_tot += weights[i] * dt * dt;
  }
  // Zero weighted variance (up to fp noise): the surrogate is trivially
  // exact on a constant target.
  if (ss_tot <= 1e-15 * wsum * (1.0 + mean * mean)) return 1.0;
  return 1.0 - ss_res / ss_tot;
}

namespace {

std::vector<std::string> distinct_tokens(const NewsArticle& a,
                                         std::vector<std::string>* sequence) {
  std::vector<std::string> toks = tokenize(a.content.headline);
  std::vector<std::string> body = tokenize(a.content.text);
  toks.insert(toks.end(), body.begin(), body.end());
  std::vector<std::string> distinct;
  for (const std::string& t : toks) {
    if (std::find(distinct.begin(), distinct.end(), t) == distinct.end())
      distinct.push_back(t);
  }
  if (sequence) *sequence = std::move(toks);
  return distinct;
}

}  // namespace

Explanation explain(const ArticleScorer& model, const NewsArticle& article,
                    const LimeConfig& config) {
  std::vector<std::string> sequence;
  std::vector<std::string> tokens = distinct_tokens(article, &sequence);
  if (tokens.empty())
    throw ValidationError("nothing to explain: article \"" + article.id +
                          "\" has no tokens");
  const std::size_t m = tokens.size();

  auto masks = perturb_masks(m, config);
  std::vector<double> weights(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i)
    weights[i] = proximity(masks[i], config.kernel_width);

  // Score every variant; the social block stays fixed because the variant
  // article keeps the original publisher and engagements.
  std::vector<std::size_t> seq_idx(sequence.size());
  for (std::size_t s = 0; s < sequence.size(); ++s)
    seq_idx[s] = static_cast<std::size_t>(
        std::find(tokens.begin(), tokens.end(), sequence[s]) - tokens.begin());
  std::vector<double> targets(masks.size());
  parallel_for(masks.size(), [&](std::size_t i) {
    NewsArticle variant = article;
    std::string text;
    for (std::size_t s = 0; s < sequence.size(); ++s) {
      if (!masks[i][seq_idx[s]]) continue;
      if (!text.empty()) text += ' ';
      text += sequence[s];
    }
    variant.content.headline.clear();
    variant.content.text = std::move(text);
    targets[i] = model.p_fake(variant);
  });

  Surrogate surrogate =
      fit_surrogate(masks, targets, weights, config.ridge_lambda);

  Explanation e;
  e.article_id = article.id;
  e.predicted_p_fake = targets[0];  // identity mask
  e.predicted_label = e.predicted_p_fake > 0.5 ? 1 : 0;
  e.intercept = surrogate.intercept;
  e.local_fidelity = surrogate_fidelity(surrogate, masks, targets, weights);
  e.config = config;

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a_, std::size_t b_) {
    return std::abs(surrogate.coefficients[a_]) >
           std::abs(surrogate.coefficients[b_]);
  });
  const std::size_t k = std::min<std::size_t>(config.top_k, m);
  for (std::size_t i = 0; i < k; ++i)
    e.token_weights.push_back({tokens[order[i]], surrogate.coefficients[order[i]]});
  return e;
}

RenderFormat render_format_from_string(const std::string& s) {
  if (s == "json") return RenderFormat::kJson;
  if (s == "html") return RenderFormat::kHtml;
  if (s == "text") return RenderFormat::kText;
  throw ValidationError("unknown render format: \"" + s + "\"");
}

namespace {

ordered_json explanation_json(const Explanation& e) {
  ordered_json j;
  j["article_id"] = e.article_id;
  j["label"] = e.predicted_label;
  j["p_fake"] = e.predicted_p_fake;
  j["tokens"] = ordered_json::array();
  for (const TokenWeight& tw : e.token_weights)
    j["tokens"].push_back({{"token", tw.token}, {"weight", tw.weight}});
  j["intercept"] = e.intercept;
  j["fidelity"] = e.local_fidelity;
  j["config"] = {{"n_samples", e.config.n_samples},
                 {"kernel_width", e.config.kernel_width},
                 {"top_k", e.config.top_k},
                 {"ridge_lambda", e.config.ridge_lambda},
                 {"seed", e.config.seed}};
  return j;
}

std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_html(const Explanation& e) {
  double max_abs = 1e-12;
  for (const TokenWeight& tw : e.token_weights)
    max_abs = std::max(max_abs, std::abs(tw.weight));
  std::ostringstream os;
  os << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">\n"
     << "<title>Explanation " << html_escape(e.article_id) << "</title>\n"
     << "<style>body{font-family:sans-serif;max-width:640px;margin:2em auto}"
     << ".tok{padding:2px 6px;border-radius:4px;margin:2px;display:"
        "inline-block}"
     << ".bar{height:14px;display:inline-block;vertical-align:middle}"
     << ".pos{background:#2e7d32;color:#fff}.neg{background:#c62828;color:"
        "#fff}"
     << "table{border-collapse:collapse}td{padding:4px 8px}</style></head>\n"
     << "<body>\n<h2>Article " << html_escape(e.article_id) << "</h2>\n"
     << "<p>predicted: <b>" << (e.predicted_label == 1 ? "fake" : "real")
     << "</b> (p_fake = " << e.predicted_p_fake
     << "), local fidelity = " << e.local_fidelity << "</p>\n<p>\n";
  for (const TokenWeight& tw : e.token_weights)
    os << "<span class=\"tok " << (tw.weight >= 0 ? "pos" : "neg") << "\">"
       << html_escape(tw.token) << "</span>\n";
  os << "</p>\n<table>\n";
  for (const TokenWeight& tw : e.token_weights) {
    int px = static_cast<int>(std::lround(200.0 * std::abs(tw.weight) / max_abs));
    os << "<tr><td>" << html_escape(tw.token) << "</td><td>" << tw.weight
       << "</td><td><span class=\"bar " << (tw.weight >= 0 ? "pos" : "neg")
       << "\" style=\"width:" << px << "px\"></span></td></tr>\n";
  }
  os << "</table>\n</body></html>\n";
  return os.str();
}

std::string render_text(const Explanation& e) {
  std::ostringstream os;
  os << "article: " << e.article_id << "\n"
     << "predicted: " << (e.predicted_label == 1 ? "fake" : "real")
     << "  p_fake: " << e.predicted_p_fake
     << "  fidelity: " << e.local_fidelity << "\n\n";
  std::size_t width = 5;
  for (const TokenWeight& tw : e.token_weights)
    width = std::max(width, tw.token.size());
  os << "token";
  for (std::size_t i = 5; i < width; ++i) os << ' ';
  os << "  weight      direction\n";
  for (const TokenWeight& tw : e.token_weights) {
    os << tw.token;
    for (std::size_t i = tw.token.size(); i < width; ++i) os << ' ';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "  %+.6f", tw.weight);
    os << buf << "   " << (tw.weight >= 0 ? "fake" : "real") << "\n";
  }
  return os.str();
}

}  // namespace

std::string render(const Explanation& e, RenderFormat format) {
  switch (format) {
    case RenderFormat::kJson:
      return explanation_json(e).dump(2) + "\n";
    case RenderFormat::kHtml:
      return render_html(e);
    default:
      return render_text(e);
  }
}

Explanation explanation_from_json(const std::string& json_text) {
  ordered_json j = ordered_json::parse(json_text);
  Explanation e;
  e.article_id = j.at("article_id").get<std::string>();
  e.predicted_label = j.at("label").get<int>();
  e.predicted_p_fake = j.at("p_fake").get<double>();
  for (const auto& t : j.at("tokens"))
    e.token_weights.push_back(
        {t.at("token").get<std::string>(), t.at("weight").get<double>()});
  e.intercept = j.at("intercept").get<double>();
  e.local_fidelity = j.at("fidelity").get<double>();
  const auto& c = j.at("config");
  e.config.n_samples = c.at("n_samples").get<int>();
  e.config.kernel_width = c.at("kernel_width").get<double>();
  e.config.top_k = c.at("top_k").get<int>();
  e.config.ridge_lambda = c.at("ridge_lambda").get<double>();
  e.config.seed = c.at("seed").get<std::uint64_t>();
  return e;
}

}  // namespace fnd
