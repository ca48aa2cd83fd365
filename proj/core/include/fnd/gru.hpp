#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fnd/corpus.hpp"
#include "fnd/features.hpp"

namespace fnd {

struct GruConfig {
  int d_e = 64;
  int d_h = 64;
  int max_seq_len = 128;
  int epochs = 6;
  int batch_size = 32;
  double learning_rate = 0.1;
  double grad_clip = 5.0;            // global-norm clip
  double validation_fraction = 0.1;  // held out of train for checkpointing
  std::uint64_t seed = 0;
};

// GRU text classifier parameters. Embedding row 0 is the padding token and
// stays frozen at zero (padding ids are skipped in the recurrence); row 1
// is the shared UNK index. The social block enters at the output layer:
// p_fake = sigmoid(v . [h_T; social] + c).
struct GruParams {
  GruConfig config;
  std::vector<std::string> emb_terms;  // tokens for ids 2..; 0=pad, 1=unk
  std::unordered_map<std::string, std::int32_t> emb_index;
  int n_social = static_cast<int>(kSocialFeatureCount);

  // Row-major tensors.
  std::vector<double> e;                // (2 + emb_terms) x d_e
  std::vector<double> wz, wr, wh;       // d_h x d_e
  std::vector<double> uz, ur, uh;       // d_h x d_h
  std::vector<double> bz, br, bh;       // d_h
  std::vector<double> v;                // d_h + n_social
  double c = 0.0;

  int vocab_rows() const { return static_cast<int>(emb_terms.size()) + 2; }
  std::size_t parameter_count() const;

  // Maps article tokens to embedding ids (OOV -> 1), truncated to
  // max_seq_len.
  std::vector<std::int32_t> encode(const NewsArticle& a) const;
};

// Seeded uniform(-0.08, 0.08) initialization over every tensor.
GruParams init_gru(const std::vector<std::string>& emb_terms,
                   const GruConfig& config);

// One recurrence step: z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br),
// hc = tanh(Wh x + Uh (r*h) + bh), h' = (1-z)*h + z*hc.
std::vector<double> gru_step(const GruParams& params,
                             const std::vector<double>& x,
                             const std::vector<double>& h_prev);

// Full forward pass over encoded ids (padding ids skipped; an empty
// sequence leaves h_T = 0 so the output reduces to the social term).
double gru_forward(const GruParams& params,
                   const std::vector<std::int32_t>& token_ids,
                   const std::vector<double>& social);

// Gradients of single-instance binary cross-entropy, laid out like the
// parameter tensors.
struct GruGradients {
  std::vector<double> e, wz, wr, wh, uz, ur, uh, bz, br, bh, v;
  double c = 0.0;
};

// BCE loss and its gradients via backpropagation through time.
double gru_loss_and_gradients(const GruParams& params,
                              const std::vector<std::int32_t>& token_ids,
                              const std::vector<double>& social, int label,
                              GruGradients& grads);

// Compares analytic gradients against central finite differences on a
// deterministic sample of coordinates spread over every tensor; returns
// the max relative error. `mutate` (test hook) can corrupt the analytic
// gradients before comparison.
double gru_grad_check(
    const GruParams& params, const std::vector<std::int32_t>& token_ids,
    const std::vector<double>& social, int label, double h,
    int sample_coords = 200,
    const std::function<void(GruGradients&)>& mutate = nullptr);

// Mini-batch SGD with global-norm clipping; 10% of the train corpus is
// held out (stratified) and the parameters with the best validation
// macro-F1 are returned. Deterministic under config.seed.
GruParams train_gru(const Corpus& corpus_train, const FeatureSpace& space,
                    const GruConfig& config, FeatureMode mode);

// The word-unigram terms of a fitted space, in index order; the GRU's
// embedding vocabulary.
std::vector<std::string> word_unigram_terms(const FeatureSpace& space);

// Social block for the output layer (z-scored; zeros when mode is
// content-only).
std::vector<double> gru_social_block(const NewsArticle& a,
                                     const FeatureSpace& space,
                                     FeatureMode mode);

}  // namespace fnd
