#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cordel/data_model.hpp"
#include "cordel/embeddings.hpp"
#include "cordel/lim.hpp"
#include "cordel/metrics.hpp"
#include "cordel/models.hpp"

// Training loop (seeded mini-batch Adam with gradient averaging and
// best-validation-F1 selection), batch scoring, and per-pair explanations.
// Tokenization/contrast is done once per pair; embedding lookups happen per
// use so large datasets never hold all vectors in memory at once.

namespace cordel {

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 64;
  int epochs = 20;
  std::uint64_t seed = 0;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0;
  double valid_f1 = -1;  // percent at threshold 0.5; -1 when no validation split
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;
  double best_valid_f1 = -1;
};

// Token-level form of a pair, reusable across epochs.
struct PreparedPair {
  ContrastedPair contrasted;                          // contrast variants
  std::vector<std::vector<std::string>> left_tokens;  // twin baseline
  std::vector<std::vector<std::string>> right_tokens;
  int label = 0;
};

inline PreparedPair prepare_pair(const Schema& schema, const LabeledPair& pair, Variant v) {
  PreparedPair pp;
  pp.label = pair.label;
  if (v == Variant::kTwinSum) {
    if (pair.left.values.size() != schema.size() ||
        pair.right.values.size() != schema.size()) {
      throw std::invalid_argument("record width does not match schema");
    }
    for (std::size_t j = 0; j < schema.size(); ++j) {
      pp.left_tokens.push_back(tokenize(pair.left.values[j]));
      pp.right_tokens.push_back(tokenize(pair.right.values[j]));
    }
  } else {
    pp.contrasted = contrast_pair(pair, schema);
  }
  return pp;
}

namespace detail {

inline std::vector<Vec> embed_tokens(const EmbeddingStore& store,
                                     const std::vector<std::string>& tokens) {
  std::vector<Vec> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(store.embed(t));
  return out;
}

inline TwinEmbeddedPair embed_twin_prepared(const EmbeddingStore& store,
                                            const PreparedPair& pp) {
  TwinEmbeddedPair tp;
  tp.dim = store.dim();
  tp.per_attribute.resize(pp.left_tokens.size());
  for (std::size_t j = 0; j < pp.left_tokens.size(); ++j) {
    tp.per_attribute[j].left = embed_tokens(store, pp.left_tokens[j]);
    tp.per_attribute[j].right = embed_tokens(store, pp.right_tokens[j]);
  }
  return tp;
}

inline double l2_norm(const Vec& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace detail

inline double score_prepared(const Model& model, const EmbeddingStore& store,
                             const PreparedPair& pp) {
  if (model.config.variant == Variant::kTwinSum) {
    return twin_forward_score(model, detail::embed_twin_prepared(store, pp));
  }
  return forward_score(model, embed_contrasted_pair(store, pp.contrasted));
}

inline double score_pair(const Model& model, const EmbeddingStore& store,
                         const Schema& schema, const LabeledPair& pair) {
  return score_prepared(model, store, prepare_pair(schema, pair, model.config.variant));
}

// Pure, order-preserving map of the scoring function.
inline std::vector<double> predict_scores(const Model& model,
                                          const std::vector<LabeledPair>& pairs,
                                          const Schema& schema,
                                          const EmbeddingStore& store) {
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& p : pairs) scores.push_back(score_pair(model, store, schema, p));
  return scores;
}

inline std::vector<int> labels_of(const std::vector<LabeledPair>& pairs) {
  std::vector<int> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) labels.push_back(p.label);
  return labels;
}

// Trains in place and leaves the model at the epoch with the best validation
// F1 at threshold 0.5 (last epoch when there is no validation split).
// Deterministic given (seed, config, data, embeddings).
inline TrainHistory train(Model& model, const Dataset& dataset, const EmbeddingStore& store,
                          const TrainConfig& config) {
  if (dataset.train.empty()) throw std::runtime_error("training split is empty");
  nn::require(dataset.schema.size() == std::size_t(model.config.attribute_count),
              "dataset schema does not match model attribute count");
  nn::require(store.dim() == model.config.embedding_dim,
              "embedding store dim does not match model");
  nn::require(config.batch_size > 0 && config.epochs > 0,
              "batch size and epochs must be positive");

  const Variant variant = model.config.variant;
  std::vector<PreparedPair> train_pairs, valid_pairs;
  train_pairs.reserve(dataset.train.size());
  for (const auto& p : dataset.train) train_pairs.push_back(prepare_pair(dataset.schema, p, variant));
  valid_pairs.reserve(dataset.valid.size());
  for (const auto& p : dataset.valid) valid_pairs.push_back(prepare_pair(dataset.schema, p, variant));

  auto params = model.params();
  nn::AdamState adam(nn::AdamConfig{config.learning_rate});
  adam.init(params);

  TrainHistory history;
  std::vector<Vec> best_values;
  const std::size_t n = train_pairs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::mt19937_64 g(rng::mix(config.seed, std::uint64_t(epoch)));
    rng::shuffle(order, g);

    double loss_sum = 0;
    for (std::size_t start = 0; start < n; start += std::size_t(config.batch_size)) {
      const std::size_t end = std::min(n, start + std::size_t(config.batch_size));
      nn::zero_grads(params);
      for (std::size_t i = start; i < end; ++i) {
        const PreparedPair& pp = train_pairs[order[i]];
        if (variant == Variant::kTwinSum) {
          TwinForwardCache cache;
          auto tp = detail::embed_twin_prepared(store, pp);
          twin_forward_score(model, tp, &cache);
          loss_sum += twin_backward(model, cache, pp.label);
        } else {
          ForwardCache cache;
          auto ep = embed_contrasted_pair(store, pp.contrasted);
          forward_score(model, ep, &cache);
          loss_sum += backward(model, ep, cache, pp.label);
        }
      }
      nn::scale_grads(params, 1.0 / double(end - start));
      adam.step(params);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / double(n);
    if (!valid_pairs.empty()) {
      std::vector<double> scores;
      scores.reserve(valid_pairs.size());
      std::vector<int> labels;
      labels.reserve(valid_pairs.size());
      for (const auto& pp : valid_pairs) {
        scores.push_back(score_prepared(model, store, pp));
        labels.push_back(pp.label);
      }
      stats.valid_f1 = f1_at_threshold(scores, labels, 0.5).f1;
      if (stats.valid_f1 > history.best_valid_f1) {
        history.best_valid_f1 = stats.valid_f1;
        history.best_epoch = epoch;
        best_values.clear();
        for (const auto& p : params) best_values.push_back(p.tensor->v);
      }
    } else {
      history.best_epoch = epoch;  // no validation: last epoch wins
    }
    history.epochs.push_back(stats);
  }

  if (!best_values.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i].tensor->v = best_values[i];
  }
  return history;
}

// ---------------------------------------------------------------------------
// Case-study explanations: the token groups, a per-token weight (attention
// softmax weight for attention variants, embedding norm otherwise), and the
// norms of the per-attribute summary vectors. For the twin baseline dif_norm
// is the norm of the absolute-difference feature and sim_norm is 0.
// ---------------------------------------------------------------------------

struct TokenWeight {
  std::string token;
  double weight = 0;
};

struct AttributeExplanation {
  std::string attribute;
  std::vector<TokenWeight> shared, unique_left, unique_right;
  double sim_norm = 0;
  double dif_norm = 0;
};

struct Explanation {
  std::vector<AttributeExplanation> attributes;
  double score = 0;
};

inline Explanation explain_pair(const Model& model, const LabeledPair& pair,
                                const Schema& schema, const EmbeddingStore& store) {
  nn::require(schema.size() == std::size_t(model.config.attribute_count),
              "schema does not match model attribute count");
  Explanation ex;
  ContrastedPair cp = contrast_pair(pair, schema);
  const int m = model.config.attribute_count;

  auto norm_weights = [&](const std::vector<std::string>& tokens) {
    std::vector<TokenWeight> out;
    for (const auto& t : tokens) out.push_back({t, detail::l2_norm(store.embed(t))});
    return out;
  };
  auto attention_weights = [&](const std::vector<std::string>& tokens, const Vec& weights) {
    std::vector<TokenWeight> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) out.push_back({tokens[i], weights[i]});
    return out;
  };

  if (model.config.variant == Variant::kTwinSum) {
    PreparedPair pp = prepare_pair(schema, pair, Variant::kTwinSum);
    TwinForwardCache cache;
    ex.score = twin_forward_score(model, detail::embed_twin_prepared(store, pp), &cache);
    for (int j = 0; j < m; ++j) {
      AttributeExplanation attr;
      attr.attribute = schema.attributes[j];
      attr.shared = norm_weights(cp.per_attribute[j].shared);
      attr.unique_left = norm_weights(cp.per_attribute[j].unique_left);
      attr.unique_right = norm_weights(cp.per_attribute[j].unique_right);
      Vec feat(cache.mlp_in.begin() + std::size_t(j) * model.config.sim_dif_dim,
               cache.mlp_in.begin() + std::size_t(j + 1) * model.config.sim_dif_dim);
      attr.dif_norm = detail::l2_norm(feat);
      ex.attributes.push_back(std::move(attr));
    }
    return ex;
  }

  EmbeddedPair ep = embed_contrasted_pair(store, cp);
  ForwardCache cache;
  ex.score = forward_score(model, ep, &cache);
  const bool attention = is_attention_variant(model.config.variant);
  for (int j = 0; j < m; ++j) {
    AttributeExplanation attr;
    attr.attribute = schema.attributes[j];
    const auto& triple = cp.per_attribute[j];
    if (attention) {
      attr.shared = attention_weights(triple.shared, cache.psi_cache[j].weights);
      attr.unique_left = attention_weights(triple.unique_left, cache.phi_left_cache[j].weights);
      attr.unique_right =
          attention_weights(triple.unique_right, cache.phi_right_cache[j].weights);
    } else {
      attr.shared = norm_weights(triple.shared);
      attr.unique_left = norm_weights(triple.unique_left);
      attr.unique_right = norm_weights(triple.unique_right);
    }
    attr.sim_norm = detail::l2_norm(cache.sim[j]);
    attr.dif_norm = detail::l2_norm(cache.dif[j]);
    ex.attributes.push_back(std::move(attr));
  }
  return ex;
}

}  // namespace cordel
