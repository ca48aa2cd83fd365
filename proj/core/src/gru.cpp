#include "fnd/gru.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "fnd/errors.hpp"
#include "fnd/eval.hpp"
#include "fnd/linear.hpp"
#include "fnd/rng.hpp"

namespace fnd {

namespace {

// y = M x, M is rows x cols row-major.
void matvec(const std::vector<double>& m, const std::vector<double>& x,
            int rows, int cols, std::vector<double>& y) {
  for (int i = 0; i < rows; ++i) {
    const double* row = m.data() + static_cast<std::size_t>(i) * cols;
    double s = 0;
    for (int j = 0; j < cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

// y += M^T x (x has `rows` entries, y has `cols`).
void matvec_t_acc(const std::vector<double>& m, const std::vector<double>& x,
                  int rows, int cols, std::vector<double>& y) {
  for (int i = 0; i < rows; ++i) {
    const double* row = m.data() + static_cast<std::size_t>(i) * cols;
    const double xi = x[i];
    for (int j = 0; j < cols; ++j) y[j] += row[j] * xi;
  }
}

// M += a b^T.
void outer_acc(std::vector<double>& m, const std::vector<double>& a,
               const std::vector<double>& b, int rows, int cols) {
  for (int i = 0; i < rows; ++i) {
    double* row = m.data() + static_cast<std::size_t>(i) * cols;
    const double ai = a[i];
    for (int j = 0; j < cols; ++j) row[j] += ai * b[j];
  }
}

struct StepTrace {
  std::vector<double> h_prev, z, r, hc, rh;
  std::int32_t token_id = 0;
};

}  // namespace

std::size_t GruParams::parameter_count() const {
  return e.size() + wz.size() + wr.size() + wh.size() + uz.size() + ur.size() +
         uh.size() + bz.size() + br.size() + bh.size() + v.size() + 1;
}

std::vector<std::int32_t> GruParams::encode(const NewsArticle& a) const {
  std::vector<std::string> toks = tokenize(a.content.headline);
  std::vector<std::string> body = tokenize(a.content.text);
  toks.insert(toks.end(), body.begin(), body.end());
  std::vector<std::int32_t> ids;
  ids.reserve(std::min<std::size_t>(toks.size(), config.max_seq_len));
  for (const std::string& t : toks) {
    if (static_cast<int>(ids.size()) >= config.max_seq_len) break;
    auto it = emb_index.find("w:" + t);
    ids.push_back(it == emb_index.end() ? 1 : it->second);
  }
  return ids;
}

GruParams init_gru(const std::vector<std::string>& emb_terms,
                   const GruConfig& config) {
  GruParams p;
  p.config = config;
  p.emb_terms = emb_terms;
  for (std::size_t i = 0; i < emb_terms.size(); ++i)
    p.emb_index[emb_terms[i]] = static_cast<std::int32_t>(i) + 2;
  const int de = config.d_e, dh = config.d_h;
  Rng rng(config.seed ^ 0x6772755F696E6974ULL);
  auto init = [&](std::vector<double>& t, std::size_t n) {
    t.resize(n);
    for (double& x : t) x = rng.uniform(-0.08, 0.08);
  };
  init(p.e, static_cast<std::size_t>(p.vocab_rows()) * de);
  std::fill(p.e.begin(), p.e.begin() + de, 0.0);  // frozen pad row
  init(p.wz, static_cast<std::size_t>(dh) * de);
  init(p.wr, static_cast<std::size_t>(dh) * de);
  init(p.wh, static_cast<std::size_t>(dh) * de);
  init(p.uz, static_cast<std::size_t>(dh) * dh);
  init(p.ur, static_cast<std::size_t>(dh) * dh);
  init(p.uh, static_cast<std::size_t>(dh) * dh);
  init(p.bz, dh);
  init(p.br, dh);
  init(p.bh, dh);
  init(p.v, dh + p.n_social);
  p.c = rng.uniform(-0.08, 0.08);
  return p;
}

std::vector<double> gru_step(const GruParams& params,
                             const std::vector<double>& x,
                             const std::vector<double>& h_prev) {
  const int de = params.config.d_e, dh = params.config.d_h;
  if (static_cast<int>(x.size()) != de ||
      static_cast<int>(h_prev.size()) != dh)
    throw ArgumentError("gru_step: shape mismatch");
  std::vector<double> z(dh), r(dh), hc(dh), tmp(dh), h(dh), rh(dh);
  matvec(params.wz, x, dh, de, z);
  matvec(params.uz, h_prev, dh, dh, tmp);
  for (int i = 0; i < dh; ++i) z[i] = sigmoid(z[i] + tmp[i] + params.bz[i]);
  matvec(params.wr, x, dh, de, r);
  matvec(params.ur, h_prev, dh, dh, tmp);
  for (int i = 0; i < dh; ++i) r[i] = sigmoid(r[i] + tmp[i] + params.br[i]);
  for (int i = 0; i < dh; ++i) rh[i] = r[i] * h_prev[i];
  matvec(params.wh, x, dh, de, hc);
  matvec(params.uh, rh, dh, dh, tmp);
  for (int i = 0; i < dh; ++i)
    hc[i] = std::tanh(hc[i] + tmp[i] + params.bh[i]);
  for (int i = 0; i < dh; ++i)
    h[i] = (1.0 - z[i]) * h_prev[i] + z[i] * hc[i];
  return h;
}

namespace {

// Forward pass that also records per-step intermediates for BPTT.
double forward_traced(const GruParams& params,
                      const std::vector<std::int32_t>& token_ids,
                      const std::vector<double>& social,
                      std::vector<StepTrace>* trace,
                      std::vector<double>* h_final) {
  const int de = params.config.d_e, dh = params.config.d_h;
  if (static_cast<int>(social.size()) != params.n_social)
    throw ArgumentError("gru forward: social block size mismatch");
  std::vector<double> h(dh, 0.0), x(de);
  for (std::int32_t id : token_ids) {
    if (id == 0) continue;  // padding carries nothing
    if (id < 0 || id >= params.vocab_rows())
      throw ArgumentError("gru forward: token id out of range");
    std::copy_n(params.e.begin() + static_cast<std::size_t>(id) * de, de,
                x.begin());
    StepTrace st;
    if (trace) {
      st.h_prev = h;
      st.token_id = id;
    }
    // Inline gru_step, keeping the gate activations.
    std::vector<double> z(dh), r(dh), hc(dh), tmp(dh), rh(dh);
    matvec(params.wz, x, dh, de, z);
    matvec(params.uz, h, dh, dh, tmp);
    for (int i = 0; i < dh; ++i) z[i] = sigmoid(z[i] + tmp[i] + params.bz[i]);
    matvec(params.wr, x, dh, de, r);
    matvec(params.ur, h, dh, dh, tmp);
    for (int i = 0; i < dh; ++i) r[i] = sigmoid(r[i] + tmp[i] + params.br[i]);
    for (int i = 0; i < dh; ++i) rh[i] = r[i] * h[i];
    matvec(params.wh, x, dh, de, hc);
    matvec(params.uh, rh, dh, dh, tmp);
    for (int i = 0; i < dh; ++i)
      hc[i] = std::tanh(hc[i] + tmp[i] + params.bh[i]);
    for (int i = 0; i < dh; ++i) h[i] = (1.0 - z[i]) * h[i] + z[i] * hc[i];
    if (trace) {
      st.z = std::move(z);
      st.r = std::move(r);
      st.hc = std::move(hc);
      st.rh = std::move(rh);
      trace->push_back(std::move(st));
    }
  }
  double logit = params.c;
  for (int i = 0; i < dh; ++i) logit += params.v[i] * h[i];
  for (int k = 0; k < params.n_social; ++k)
    logit += params.v[dh + k] * social[k];
  if (h_final) *h_final = std::move(h);
  return sigmoid(logit);
}

void zero_like(const GruParams& p, GruGradients& g) {
  g.e.assign(p.e.size(), 0.0);
  g.wz.assign(p.wz.size(), 0.0);
  g.wr.assign(p.wr.size(), 0.0);
  g.wh.assign(p.wh.size(), 0.0);
  g.uz.assign(p.uz.size(), 0.0);
  g.ur.assign(p.ur.size(), 0.0);
  g.uh.assign(p.uh.size(), 0.0);
  g.bz.assign(p.bz.size(), 0.0);
  g.br.assign(p.br.size(), 0.0);
  g.bh.assign(p.bh.size(), 0.0);
  g.v.assign(p.v.size(), 0.0);
  g.c = 0.0;
}

}  // namespace

double gru_forward(const GruParams& params,
                   const std::vector<std::int32_t>& token_ids,
                   const std::vector<double>& social) {
  return forward_traced(params, token_ids, social, nullptr, nullptr);
}

double gru_loss_and_gradients(const GruParams& params,
                              const std::vector<std::int32_t>& token_ids,
                              const std::vector<double>& social, int label,
                              GruGradients& grads) {
  const int de = params.config.d_e, dh = params.config.d_h;
  std::vector<StepTrace> trace;
  std::vector<double> h_final;
  double p = forward_traced(params, token_ids, social, &trace, &h_final);
  zero_like(params, grads);

  const double eps = 1e-12;
  double loss = label == 1 ? -std::log(std::max(p, eps))
                           : -std::log(std::max(1.0 - p, eps));

  // d loss / d logit for BCE-with-sigmoid.
  const double dlogit = p - static_cast<double>(label);
  grads.c = dlogit;
  for (int i = 0; i < dh; ++i) grads.v[i] = dlogit * h_final[i];
  for (int k = 0; k < params.n_social; ++k)
    grads.v[dh + k] = dlogit * social[k];

  std::vector<double> dh_vec(dh);
  for (int i = 0; i < dh; ++i) dh_vec[i] = dlogit * params.v[i];

  std::vector<double> dz(dh), dhc(dh), dh_prev(dh), daz(dh), dar(dh), dah(dh),
      drh(dh), dr(dh), dx(de), x(de);
  for (std::size_t t = trace.size(); t-- > 0;) {
    const StepTrace& st = trace[t];
    std::copy_n(params.e.begin() + static_cast<std::size_t>(st.token_id) * de,
                de, x.begin());
    for (int i = 0; i < dh; ++i) {
      dz[i] = dh_vec[i] * (st.hc[i] - st.h_prev[i]);
      dhc[i] = dh_vec[i] * st.z[i];
      dh_prev[i] = dh_vec[i] * (1.0 - st.z[i]);
      dah[i] = dhc[i] * (1.0 - st.hc[i] * st.hc[i]);
    }
    // candidate path
    outer_acc(grads.wh, dah, x, dh, de);
    outer_acc(grads.uh, dah, st.rh, dh, dh);
    for (int i = 0; i < dh; ++i) grads.bh[i] += dah[i];
    std::fill(drh.begin(), drh.end(), 0.0);
    matvec_t_acc(params.uh, dah, dh, dh, drh);
    for (int i = 0; i < dh; ++i) {
      dr[i] = drh[i] * st.h_prev[i];
      dh_prev[i] += drh[i] * st.r[i];
      dar[i] = dr[i] * st.r[i] * (1.0 - st.r[i]);
      daz[i] = dz[i] * st.z[i] * (1.0 - st.z[i]);
    }
    // reset gate
    outer_acc(grads.wr, dar, x, dh, de);
    outer_acc(grads.ur, dar, st.h_prev, dh, dh);
    for (int i = 0; i < dh; ++i) grads.br[i] += dar[i];
    matvec_t_acc(params.ur, dar, dh, dh, dh_prev);
    // update gate
    outer_acc(grads.wz, daz, x, dh, de);
    outer_acc(grads.uz, daz, st.h_prev, dh, dh);
    for (int i = 0; i < dh; ++i) grads.bz[i] += daz[i];
    matvec_t_acc(params.uz, daz, dh, dh, dh_prev);
    // embedding
    std::fill(dx.begin(), dx.end(), 0.0);
    matvec_t_acc(params.wz, daz, dh, de, dx);
    matvec_t_acc(params.wr, dar, dh, de, dx);
    matvec_t_acc(params.wh, dah, dh, de, dx);
    double* erow = grads.e.data() + static_cast<std::size_t>(st.token_id) * de;
    for (int j = 0; j < de; ++j) erow[j] += dx[j];

    dh_vec.swap(dh_prev);
  }
  return loss;
}

namespace {

struct CoordRef {
  std::vector<double>* tensor;
  std::vector<double>* grad;
  std::size_t index;
};

double tensor_value(const GruGradients& g, int tensor_id, std::size_t idx) {
  switch (tensor_id) {
    case 0: return g.e[idx];
    case 1: return g.wz[idx];
    case 2: return g.wr[idx];
    case 3: return g.wh[idx];
    case 4: return g.uz[idx];
    case 5: return g.ur[idx];
    case 6: return g.uh[idx];
    case 7: return g.bz[idx];
    case 8: return g.br[idx];
    case 9: return g.bh[idx];
    case 10: return g.v[idx];
    default: return g.c;
  }
}

std::vector<double>* param_tensor(GruParams& p, int tensor_id) {
  switch (tensor_id) {
    case 0: return &p.e;
    case 1: return &p.wz;
    case 2: return &p.wr;
    case 3: return &p.wh;
    case 4: return &p.uz;
    case 5: return &p.ur;
    case 6: return &p.uh;
    case 7: return &p.bz;
    case 8: return &p.br;
    case 9: return &p.bh;
    case 10: return &p.v;
    default: return nullptr;
  }
}

}  // namespace

double gru_grad_check(const GruParams& params,
                      const std::vector<std::int32_t>& token_ids,
                      const std::vector<double>& social, int label, double h,
                      int sample_coords,
                      const std::function<void(GruGradients&)>& mutate) {
  GruGradients analytic;
  gru_loss_and_gradients(params, token_ids, social, label, analytic);
  if (mutate) mutate(analytic);

  GruParams probe = params;
  auto loss_at = [&]() {
    GruGradients scratch;
    return gru_loss_and_gradients(probe, token_ids, social, label, scratch);
  };

  // Deterministic coordinate sample stratified over the 12 tensors so the
  // recurrent weights are always covered.
  Rng rng(0x46444348ULL);  // fixed: the check itself is not configurable
  const int tensors = 12;
  const int per_tensor = std::max(1, sample_coords / tensors);
  double max_rel = 0.0;
  for (int tid = 0; tid < tensors; ++tid) {
    std::size_t size = 1;
    if (tid < 11) size = param_tensor(probe, tid)->size();
    if (size == 0) continue;
    for (int s = 0; s < per_tensor; ++s) {
      std::size_t idx = rng.uniform_int(size);
      double* slot = tid < 11 ? &(*param_tensor(probe, tid))[idx] : &probe.c;
      double saved = *slot;
      *slot = saved + h;
      double lp = loss_at();
      *slot = saved - h;
      double lm = loss_at();
      *slot = saved;
      double numeric = (lp - lm) / (2.0 * h);
      double a = tensor_value(analytic, tid, tid < 11 ? idx : 0);
      // The floor keeps centered-difference roundoff (~|loss|*eps/h) from
      // swamping coordinates whose true gradient is near zero.
      double denom = std::max(std::abs(a) + std::abs(numeric), 1e-6);
      double rel = std::abs(a - numeric) / denom;
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

std::vector<std::string> word_unigram_terms(const FeatureSpace& space) {
  std::vector<std::string> terms;
  for (const std::string& t : space.vocabulary.terms) {
    if (t.size() > 2 && t[0] == 'w' && t[1] == ':' &&
        t.find(' ') == std::string::npos)
      terms.push_back(t);
  }
  return terms;
}

std::vector<double> gru_social_block(const NewsArticle& a,
                                     const FeatureSpace& space,
                                     FeatureMode mode) {
  std::vector<double> s(kSocialFeatureCount, 0.0);
  if (mode == FeatureMode::kContentOnly) return s;
  auto f = social_features(a);
  for (std::size_t k = 0; k < f.size(); ++k) {
    double sd = space.social_stdev[k];
    s[k] = sd > 0 ? (f[k] - space.social_mean[k]) / sd : 0.0;
  }
  return s;
}

namespace {

struct GruInstance {
  std::vector<std::int32_t> ids;
  std::vector<double> social;
  int label;
};

double macro_f1_of(const std::vector<int>& preds,
                   const std::vector<int>& gold) {
  return metrics(preds, gold).macro.f1;
}

void add_scaled(std::vector<double>& acc, const std::vector<double>& g,
                double s) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s * g[i];
}

double sq_norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

GruParams train_gru(const Corpus& corpus_train, const FeatureSpace& space,
                    const GruConfig& config, FeatureMode mode) {
  if (mode == FeatureMode::kSocialOnly)
    throw ValidationError("gru is a sequence model; social-only features are "
                          "not supported");
  if (corpus_train.articles.empty())
    throw ArgumentError("train_gru: empty training corpus");

  GruParams params = init_gru(word_unigram_terms(space), config);

  std::vector<GruInstance> data;
  data.reserve(corpus_train.size());
  std::array<int, 2> label_count{};
  for (const NewsArticle& a : corpus_train.articles) {
    if (!a.label)
      throw ValidationError("train_gru: unlabeled article \"" + a.id + "\"");
    GruInstance inst;
    inst.ids = params.encode(a);
    inst.social = gru_social_block(a, space, mode);
    inst.label = static_cast<int>(*a.label);
    label_count[inst.label] += 1;
    data.push_back(std::move(inst));
  }
  if (label_count[0] == 0 || label_count[1] == 0)
    throw ValidationError("train_gru: both labels must be present");

  // Stratified validation holdout.
  Rng rng(config.seed);
  std::array<std::vector<std::size_t>, 2> by_label;
  for (std::size_t i = 0; i < data.size(); ++i)
    by_label[data[i].label].push_back(i);
  std::vector<std::size_t> train_idx, val_idx;
  for (auto& idx : by_label) {
    rng.shuffle(idx);
    auto n_val = static_cast<std::size_t>(
        std::floor(config.validation_fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < n_val ? val_idx : train_idx).push_back(idx[i]);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  if (val_idx.empty()) {
    // Too small to hold anything out; validate on the train set.
    val_idx = train_idx;
  }

  auto validate = [&](const GruParams& p) {
    std::vector<int> preds, gold;
    preds.reserve(val_idx.size());
    for (std::size_t i : val_idx) {
      double prob = gru_forward(p, data[i].ids, data[i].social);
      preds.push_back(prob > 0.5 ? 1 : 0);
      gold.push_back(data[i].label);
    }
    return macro_f1_of(preds, gold);
  };

  GruParams best = params;
  double best_f1 = validate(params);

  GruGradients acc, one;
  const int de = config.d_e, dh = config.d_h;
  (void)de;
  (void)dh;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(train_idx);
    double epoch_loss = 0;
    for (std::size_t start = 0; start < train_idx.size();
         start += config.batch_size) {
      std::size_t end =
          std::min(train_idx.size(), start + config.batch_size);
      zero_like(params, acc);
      for (std::size_t k = start; k < end; ++k) {
        const GruInstance& inst = data[train_idx[k]];
        epoch_loss +=
            gru_loss_and_gradients(params, inst.ids, inst.social, inst.label, one);
        add_scaled(acc.e, one.e, 1.0);
        add_scaled(acc.wz, one.wz, 1.0);
        add_scaled(acc.wr, one.wr, 1.0);
        add_scaled(acc.wh, one.wh, 1.0);
        add_scaled(acc.uz, one.uz, 1.0);
        add_scaled(acc.ur, one.ur, 1.0);
        add_scaled(acc.uh, one.uh, 1.0);
        add_scaled(acc.bz, one.bz, 1.0);
        add_scaled(acc.br, one.br, 1.0);
        add_scaled(acc.bh, one.bh, 1.0);
        add_scaled(acc.v, one.v, 1.0);
        acc.c += one.c;
      }
      const double inv_b = 1.0 / static_cast<double>(end - start);
      double norm_sq = (sq_norm(acc.e) + sq_norm(acc.wz) + sq_norm(acc.wr) +
                        sq_norm(acc.wh) + sq_norm(acc.uz) + sq_norm(acc.ur) +
                        sq_norm(acc.uh) + sq_norm(acc.bz) + sq_norm(acc.br) +
                        sq_norm(acc.bh) + sq_norm(acc.v) + acc.c * acc.c) *
                       inv_b * inv_b;
      double scale = inv_b;
      double norm = std::sqrt(norm_sq);
      if (norm > config.grad_clip) scale *= config.grad_clip / norm;
      double step = config.learning_rate * scale;
      add_scaled(params.e, acc.e, -step);
      add_scaled(params.wz, acc.wz, -step);
      add_scaled(params.wr, acc.wr, -step);
      add_scaled(params.wh, acc.wh, -step);
      add_scaled(params.uz, acc.uz, -step);
      add_scaled(params.ur, acc.ur, -step);
      add_scaled(params.uh, acc.uh, -step);
      add_scaled(params.bz, acc.bz, -step);
      add_scaled(params.br, acc.br, -step);
      add_scaled(params.bh, acc.bh, -step);
      add_scaled(params.v, acc.v, -step);
      params.c -= step * acc.c;
    }
    if (!std::isfinite(epoch_loss))
      throw TrainingError("gru: non-finite loss in epoch " +
                          std::to_string(epoch + 1) + " (lr too high?)");
    double f1 = validate(params);
    if (f1 > best_f1) {
      best_f1 = f1;
      best = params;
    }
  }
  return best;
}

}  // namespace fnd
