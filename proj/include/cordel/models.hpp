#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cordel/embeddings.hpp"
#include "cordel/nn.hpp"

// The matching models. Each attribute j gets a similarity summarizer over the
// shared-token group and a difference summarizer over the two unique-token
// groups; the per-attribute summaries are concatenated and classified by a
// two-layer MLP, optionally routed through a cross-attribute self-attention
// block first. Variants:
//   sum                one-layer MLP over the group sums
//   attention          scaled dot-product attention with trainable queries
//   context-attention  difference attention queried by the similarity vector
//   twin-sum           ablation baseline without token contrast: per-record
//                      sums, shared affine, absolute difference
//
// The difference summarizer applies one parameter set to both unique groups
// and adds the two outputs, so it is symmetric in the two records.

namespace cordel {

enum class Variant { kSum, kAttention, kContextAttention, kTwinSum };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kSum: return "sum";
    case Variant::kAttention: return "attention";
    case Variant::kContextAttention: return "context-attention";
    case Variant::kTwinSum: return "twin-sum";
  }
  throw std::invalid_argument("unknown variant");
}

inline Variant variant_from_name(const std::string& name) {
  if (name == "sum") return Variant::kSum;
  if (name == "attention") return Variant::kAttention;
  if (name == "context-attention") return Variant::kContextAttention;
  if (name == "twin-sum") return Variant::kTwinSum;
  throw std::invalid_argument("unknown variant: " + name);
}

inline bool is_attention_variant(Variant v) {
  return v == Variant::kAttention || v == Variant::kContextAttention;
}

struct ModelConfig {
  Variant variant = Variant::kSum;
  int attribute_count = 0;  // m
  int embedding_dim = 300;  // d
  int sim_dif_dim = 64;     // output of the per-attribute summarizers
  int hidden_dim = 256;     // MLP hidden layer
  int d1_trainable_q = 4;   // key/query dim when the query is trainable
  int d1_context = 64;      // key/query dim for context and self-attention
  int d2 = 64;              // attention value dim
  bool omega_self_attention = true;  // attention variants only
  std::uint64_t seed = 0;

  bool operator==(const ModelConfig&) const = default;
};

inline void validate_config(const ModelConfig& c) {
  auto positive = [](int v, const char* what) {
    if (v <= 0) throw std::invalid_argument(std::string("model config: ") + what + " must be positive");
  };
  positive(c.attribute_count, "attribute_count");
  positive(c.embedding_dim, "embedding_dim");
  positive(c.sim_dif_dim, "sim_dif_dim");
  positive(c.hidden_dim, "hidden_dim");
  positive(c.d1_trainable_q, "d1_trainable_q");
  positive(c.d1_context, "d1_context");
  positive(c.d2, "d2");
  if (is_attention_variant(c.variant)) {
    if (c.d2 != c.sim_dif_dim) {
      throw std::invalid_argument("model config: attention variants need d2 == sim_dif_dim");
    }
    if (c.variant == Variant::kContextAttention && c.d1_context != c.sim_dif_dim) {
      throw std::invalid_argument(
          "model config: context-attention needs d1_context == sim_dif_dim");
    }
  }
}

struct Model {
  ModelConfig config;

  // sum variant
  std::vector<nn::Affine> psi_affine;
  std::vector<nn::Affine> phi_affine;
  // attention variants
  std::vector<nn::AttentionUnit> psi_attention;
  std::vector<nn::AttentionUnit> phi_attention;
  nn::Tensor self_wq, self_wk, self_wv;
  // twin baseline; linear without bias, a bias cancels in |left - right|
  std::vector<nn::Tensor> twin_weight;
  // classifier MLP
  nn::Affine mlp_hidden;
  nn::Affine mlp_out;

  bool has_self_attention() const {
    return is_attention_variant(config.variant) && config.omega_self_attention;
  }

  // width of one per-attribute representation fed to the classifier block
  int r_dim() const {
    return config.variant == Variant::kTwinSum ? config.sim_dif_dim : 2 * config.sim_dif_dim;
  }

  int mlp_input_dim() const {
    if (has_self_attention()) return config.attribute_count * config.d2;
    return config.attribute_count * r_dim();
  }

  template <typename ModelT, typename Fn>
  static void for_each_param(ModelT& model, Fn&& fn) {
    const auto& c = model.config;
    for (int j = 0; j < c.attribute_count; ++j) {
      const std::string js = std::to_string(j);
      switch (c.variant) {
        case Variant::kSum:
          fn("psi" + js + ".w", model.psi_affine[j].w);
          fn("psi" + js + ".b", model.psi_affine[j].b);
          fn("phi" + js + ".w", model.phi_affine[j].w);
          fn("phi" + js + ".b", model.phi_affine[j].b);
          break;
        case Variant::kAttention:
        case Variant::kContextAttention:
          fn("psi" + js + ".wk", model.psi_attention[j].w_key);
          fn("psi" + js + ".wv", model.psi_attention[j].w_value);
          fn("psi" + js + ".q", model.psi_attention[j].query);
          fn("phi" + js + ".wk", model.phi_attention[j].w_key);
          fn("phi" + js + ".wv", model.phi_attention[j].w_value);
          if (c.variant == Variant::kAttention) {
            fn("phi" + js + ".q", model.phi_attention[j].query);
          }
          break;
        case Variant::kTwinSum:
          fn("twin" + js + ".w", model.twin_weight[j]);
          break;
      }
    }
    if (model.has_self_attention()) {
      fn("omega.wq", model.self_wq);
      fn("omega.wk", model.self_wk);
      fn("omega.wv", model.self_wv);
    }
    fn("omega.mlp1.w", model.mlp_hidden.w);
    fn("omega.mlp1.b", model.mlp_hidden.b);
    fn("omega.mlp2.w", model.mlp_out.w);
    fn("omega.mlp2.b", model.mlp_out.b);
  }

  // Registry of every trainable tensor, each exactly once, in a fixed order.
  std::vector<nn::ParamRef> params() {
    std::vector<nn::ParamRef> out;
    for_each_param(*this, [&](std::string name, nn::Tensor& t) {
      out.push_back({std::move(name), &t});
    });
    return out;
  }

  std::size_t param_count() const {
    std::size_t total = 0;
    for_each_param(const_cast<Model&>(*this),
                   [&](const std::string&, nn::Tensor& t) { total += t.size(); });
    return total;
  }

  // Similarity summary of attribute j's shared-token group. Sum: ReLU of the
  // affine map over the group sum (an empty group goes through as the zero
  // sum). Attention: trainable-query attention, zero vector on empty groups.
  Vec sim_summary(int j, const std::vector<Vec>& shared) const {
    nn::require(config.variant != Variant::kTwinSum, "twin-sum has no similarity path");
    if (config.variant == Variant::kSum) {
      Vec sum(config.embedding_dim, 0.0);
      for (const auto& v : shared) nn::axpy(1.0, v, sum);
      return nn::relu(psi_affine[j].forward(sum));
    }
    return nn::attention_forward(psi_attention[j], shared, nullptr, nullptr);
  }

  // Difference summary of attribute j's two unique-token groups; one
  // parameter set covers both sides. Context-attention requires the
  // similarity summary as the query, the other variants forbid it.
  Vec dif_summary(int j, const std::vector<Vec>& unique_left,
                  const std::vector<Vec>& unique_right,
                  const Vec* context = nullptr) const {
    nn::require(config.variant != Variant::kTwinSum, "twin-sum has no difference path");
    if (config.variant == Variant::kSum) {
      nn::require(context == nullptr, "sum variant takes no context query");
      Vec sum(config.embedding_dim, 0.0);
      for (const auto& v : unique_left) nn::axpy(1.0, v, sum);
      for (const auto& v : unique_right) nn::axpy(1.0, v, sum);
      return nn::relu(phi_affine[j].forward(sum));
    }
    Vec out = nn::attention_forward(phi_attention[j], unique_left, context, nullptr);
    nn::axpy(1.0, nn::attention_forward(phi_attention[j], unique_right, context, nullptr),
             out);
    return out;
  }

  // Classifier logits over the m per-attribute representations: either plain
  // concatenation into the two-layer MLP, or the cross-attribute
  // self-attention block whose m outputs are concatenated first.
  Vec classify(const std::vector<Vec>& r) const {
    nn::require(r.size() == std::size_t(config.attribute_count),
                "classify: expected one representation per attribute");
    Vec mlp_in;
    if (has_self_attention()) {
      const int m = config.attribute_count;
      const double scale = 1.0 / std::sqrt(double(config.d1_context));
      std::vector<Vec> q_cols(m), k_cols(m), v_cols(m);
      for (int i = 0; i < m; ++i) {
        q_cols[i] = nn::matvec(self_wq, r[i]);
        k_cols[i] = nn::matvec(self_wk, r[i]);
        v_cols[i] = nn::matvec(self_wv, r[i]);
      }
      for (int j = 0; j < m; ++j) {
        Vec scores(m);
        for (int i = 0; i < m; ++i) scores[i] = nn::dot(k_cols[i], q_cols[j]) * scale;
        Vec weights = nn::softmax(scores);
        Vec o(config.d2, 0.0);
        for (int i = 0; i < m; ++i) nn::axpy(weights[i], v_cols[i], o);
        mlp_in.insert(mlp_in.end(), o.begin(), o.end());
      }
    } else {
      for (const auto& rv : r) mlp_in.insert(mlp_in.end(), rv.begin(), rv.end());
    }
    return mlp_out.forward(nn::relu(mlp_hidden.forward(mlp_in)));
  }
};

// Closed-form trainable-parameter count; must agree with the registry.
inline std::size_t expected_param_count(const ModelConfig& c) {
  validate_config(c);
  const std::size_t m = c.attribute_count;
  const std::size_t d = c.embedding_dim;
  const std::size_t s = c.sim_dif_dim;
  const std::size_t h = c.hidden_dim;
  const std::size_t d1t = c.d1_trainable_q;
  const std::size_t d1c = c.d1_context;
  const std::size_t d2 = c.d2;

  std::size_t per_attr = 0;
  std::size_t omega_attn = 0;
  std::size_t mlp_in = 0;
  switch (c.variant) {
    case Variant::kSum:
      per_attr = 2 * (s * d + s);
      mlp_in = m * 2 * s;
      break;
    case Variant::kAttention:
      per_attr = 2 * (d1t * d + d2 * d + d1t);
      mlp_in = c.omega_self_attention ? m * d2 : m * 2 * s;
      if (c.omega_self_attention) omega_attn = 2 * d1c * (2 * s) + d2 * (2 * s);
      break;
    case Variant::kContextAttention:
      per_attr = (d1t * d + d2 * d + d1t) + (d1c * d + d2 * d);
      mlp_in = c.omega_self_attention ? m * d2 : m * 2 * s;
      if (c.omega_self_attention) omega_attn = 2 * d1c * (2 * s) + d2 * (2 * s);
      break;
    case Variant::kTwinSum:
      per_attr = s * d;
      mlp_in = m * s;
      break;
  }
  return m * per_attr + omega_attn + (h * mlp_in + h) + (2 * h + 2);
}

inline Model init_model(const ModelConfig& cfg) {
  validate_config(cfg);
  Model model;
  model.config = cfg;
  const int m = cfg.attribute_count;
  const int d = cfg.embedding_dim;
  const int s = cfg.sim_dif_dim;

  switch (cfg.variant) {
    case Variant::kSum:
      for (int j = 0; j < m; ++j) {
        model.psi_affine.emplace_back(s, d);
        model.phi_affine.emplace_back(s, d);
      }
      break;
    case Variant::kAttention:
      for (int j = 0; j < m; ++j) {
        model.psi_attention.emplace_back(cfg.d1_trainable_q, cfg.d2, d,
                                         nn::QueryMode::kTrainable);
        model.phi_attention.emplace_back(cfg.d1_trainable_q, cfg.d2, d,
                                         nn::QueryMode::kTrainable);
      }
      break;
    case Variant::kContextAttention:
      for (int j = 0; j < m; ++j) {
        model.psi_attention.emplace_back(cfg.d1_trainable_q, cfg.d2, d,
                                         nn::QueryMode::kTrainable);
        model.phi_attention.emplace_back(cfg.d1_context, cfg.d2, d,
                                         nn::QueryMode::kExternal);
      }
      break;
    case Variant::kTwinSum:
      for (int j = 0; j < m; ++j) model.twin_weight.emplace_back(s, d);
      break;
  }
  if (model.has_self_attention()) {
    model.self_wq = nn::Tensor(cfg.d1_context, 2 * s);
    model.self_wk = nn::Tensor(cfg.d1_context, 2 * s);
    model.self_wv = nn::Tensor(cfg.d2, 2 * s);
  }
  model.mlp_hidden = nn::Affine(cfg.hidden_dim, model.mlp_input_dim());
  model.mlp_out = nn::Affine(2, cfg.hidden_dim);

  // One generator drives everything, consumed in registry order: weights get
  // glorot-uniform, biases stay zero, queries get scaled normals.
  std::mt19937_64 g(cfg.seed);
  for (auto& p : model.params()) {
    if (p.name.ends_with(".b")) continue;
    if (p.name.ends_with(".q")) nn::query_normal(*p.tensor, g);
    else nn::glorot_uniform(*p.tensor, g);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Forward / backward
// ---------------------------------------------------------------------------

struct ForwardCache {
  // sum paths
  std::vector<Vec> shared_sum, unique_sum;  // m × d
  std::vector<Vec> sim_pre, dif_pre;        // m × s
  // attention paths
  std::vector<nn::AttentionCache> psi_cache, phi_left_cache, phi_right_cache;
  std::vector<Vec> sim, dif, r;  // m × s, m × s, m × 2s
  // cross-attribute self-attention
  std::vector<Vec> q_cols, k_cols, v_cols;  // m columns
  std::vector<Vec> attn_weights;            // row j = weights attending from r_j
  std::vector<Vec> o_cols;                  // m × d2
  // classifier
  Vec mlp_in, hidden_pre, hidden, logits, probs;
  double score = 0;
};

namespace detail {

inline Vec sum_vectors(const std::vector<Vec>& vecs, int dim) {
  Vec out(dim, 0.0);
  for (const auto& v : vecs) nn::axpy(1.0, v, out);
  return out;
}

inline void check_pair_shape(const Model& model, const EmbeddedPair& ep) {
  nn::require(ep.per_attribute.size() == std::size_t(model.config.attribute_count),
              "embedded pair attribute count does not match model");
  nn::require(ep.dim == model.config.embedding_dim,
              "embedding dim does not match model");
}

}  // namespace detail

// Matching score in [0,1] (softmax of the two logits, match component). The
// cache keeps every intermediate needed for backward and stays valid only as
// long as the embedded pair it was computed from.
inline double forward_score(const Model& model, const EmbeddedPair& ep,
                            ForwardCache* cache = nullptr) {
  nn::require(model.config.variant != Variant::kTwinSum,
              "twin-sum scores token pairs, use twin_forward_score");
  detail::check_pair_shape(model, ep);
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c = ForwardCache{};

  const auto& cfg = model.config;
  const int m = cfg.attribute_count;
  const int s = cfg.sim_dif_dim;
  c.sim.resize(m);
  c.dif.resize(m);
  c.r.resize(m);
  if (cfg.variant == Variant::kSum) {
    c.shared_sum.resize(m);
    c.unique_sum.resize(m);
    c.sim_pre.resize(m);
    c.dif_pre.resize(m);
  } else {
    c.psi_cache.resize(m);
    c.phi_left_cache.resize(m);
    c.phi_right_cache.resize(m);
  }

  for (int j = 0; j < m; ++j) {
    const auto& groups = ep.per_attribute[j];
    if (cfg.variant == Variant::kSum) {
      c.shared_sum[j] = detail::sum_vectors(groups.shared, cfg.embedding_dim);
      c.sim_pre[j] = model.psi_affine[j].forward(c.shared_sum[j]);
      c.sim[j] = nn::relu(c.sim_pre[j]);
      Vec unique = detail::sum_vectors(groups.unique_left, cfg.embedding_dim);
      nn::axpy(1.0, detail::sum_vectors(groups.unique_right, cfg.embedding_dim), unique);
      c.unique_sum[j] = std::move(unique);
      c.dif_pre[j] = model.phi_affine[j].forward(c.unique_sum[j]);
      c.dif[j] = nn::relu(c.dif_pre[j]);
    } else {
      c.sim[j] = nn::attention_forward(model.psi_attention[j], groups.shared, nullptr,
                                       &c.psi_cache[j]);
      const Vec* q = cfg.variant == Variant::kContextAttention ? &c.sim[j] : nullptr;
      Vec left = nn::attention_forward(model.phi_attention[j], groups.unique_left, q,
                                       &c.phi_left_cache[j]);
      Vec right = nn::attention_forward(model.phi_attention[j], groups.unique_right, q,
                                        &c.phi_right_cache[j]);
      nn::axpy(1.0, right, left);
      c.dif[j] = std::move(left);
    }
    c.r[j].clear();
    c.r[j].reserve(2 * s);
    c.r[j].insert(c.r[j].end(), c.sim[j].begin(), c.sim[j].end());
    c.r[j].insert(c.r[j].end(), c.dif[j].begin(), c.dif[j].end());
  }

  if (model.has_self_attention()) {
    const double scale = 1.0 / std::sqrt(double(cfg.d1_context));
    c.q_cols.resize(m);
    c.k_cols.resize(m);
    c.v_cols.resize(m);
    c.attn_weights.resize(m);
    c.o_cols.resize(m);
    for (int i = 0; i < m; ++i) {
      c.q_cols[i] = nn::matvec(model.self_wq, c.r[i]);
      c.k_cols[i] = nn::matvec(model.self_wk, c.r[i]);
      c.v_cols[i] = nn::matvec(model.self_wv, c.r[i]);
    }
    for (int j = 0; j < m; ++j) {
      Vec scores(m);
      for (int i = 0; i < m; ++i) scores[i] = nn::dot(c.k_cols[i], c.q_cols[j]) * scale;
      c.attn_weights[j] = nn::softmax(scores);
      Vec o(cfg.d2, 0.0);
      for (int i = 0; i < m; ++i) nn::axpy(c.attn_weights[j][i], c.v_cols[i], o);
      c.o_cols[j] = std::move(o);
    }
    c.mlp_in.clear();
    for (int j = 0; j < m; ++j)
      c.mlp_in.insert(c.mlp_in.end(), c.o_cols[j].begin(), c.o_cols[j].end());
  } else {
    c.mlp_in.clear();
    for (int j = 0; j < m; ++j) c.mlp_in.insert(c.mlp_in.end(), c.r[j].begin(), c.r[j].end());
  }

  c.hidden_pre = model.mlp_hidden.forward(c.mlp_in);
  c.hidden = nn::relu(c.hidden_pre);
  c.logits = model.mlp_out.forward(c.hidden);
  c.probs = nn::softmax(c.logits);
  c.score = c.probs[1];
  return c.score;
}

// Accumulates exact gradients for every registered parameter; returns the
// cross-entropy loss. `ep` must be the pair the cache was computed from.
inline double backward(Model& model, const EmbeddedPair& ep, const ForwardCache& c,
                       int label) {
  detail::check_pair_shape(model, ep);
  nn::require(!c.logits.empty(), "backward: stale or empty forward cache");
  const auto& cfg = model.config;
  const int m = cfg.attribute_count;
  const int s = cfg.sim_dif_dim;

  auto ce = nn::cross_entropy(c.logits, label);
  Vec grad_hidden(cfg.hidden_dim, 0.0);
  model.mlp_out.backward(c.hidden, ce.grad_logits, &grad_hidden);
  Vec grad_hidden_pre = nn::relu_backward(c.hidden_pre, grad_hidden);
  Vec grad_mlp_in(c.mlp_in.size(), 0.0);
  model.mlp_hidden.backward(c.mlp_in, grad_hidden_pre, &grad_mlp_in);

  std::vector<Vec> grad_r(m, Vec(2 * s, 0.0));
  if (model.has_self_attention()) {
    const double scale = 1.0 / std::sqrt(double(cfg.d1_context));
    std::vector<Vec> grad_q(m, Vec(cfg.d1_context, 0.0));
    std::vector<Vec> grad_k(m, Vec(cfg.d1_context, 0.0));
    std::vector<Vec> grad_v(m, Vec(cfg.d2, 0.0));
    for (int j = 0; j < m; ++j) {
      Vec grad_o(grad_mlp_in.begin() + std::size_t(j) * cfg.d2,
                 grad_mlp_in.begin() + std::size_t(j + 1) * cfg.d2);
      Vec grad_w(m);
      for (int i = 0; i < m; ++i) grad_w[i] = nn::dot(c.v_cols[i], grad_o);
      Vec grad_scores = nn::softmax_backward(c.attn_weights[j], grad_w);
      for (int i = 0; i < m; ++i) {
        nn::axpy(grad_scores[i] * scale, c.k_cols[i], grad_q[j]);
        nn::axpy(grad_scores[i] * scale, c.q_cols[j], grad_k[i]);
        nn::axpy(c.attn_weights[j][i], grad_o, grad_v[i]);
      }
    }
    for (int i = 0; i < m; ++i) {
      nn::matvec_backward(model.self_wq, c.r[i], grad_q[i], &grad_r[i]);
      nn::matvec_backward(model.self_wk, c.r[i], grad_k[i], &grad_r[i]);
      nn::matvec_backward(model.self_wv, c.r[i], grad_v[i], &grad_r[i]);
    }
  } else {
    for (int j = 0; j < m; ++j) {
      std::copy(grad_mlp_in.begin() + std::size_t(j) * 2 * s,
                grad_mlp_in.begin() + std::size_t(j + 1) * 2 * s, grad_r[j].begin());
    }
  }

  for (int j = 0; j < m; ++j) {
    const auto& groups = ep.per_attribute[j];
    Vec grad_sim(grad_r[j].begin(), grad_r[j].begin() + s);
    Vec grad_dif(grad_r[j].begin() + s, grad_r[j].end());
    if (cfg.variant == Variant::kSum) {
      Vec grad_dif_pre = nn::relu_backward(c.dif_pre[j], grad_dif);
      model.phi_affine[j].backward(c.unique_sum[j], grad_dif_pre, nullptr);
      Vec grad_sim_pre = nn::relu_backward(c.sim_pre[j], grad_sim);
      model.psi_affine[j].backward(c.shared_sum[j], grad_sim_pre, nullptr);
    } else if (cfg.variant == Variant::kAttention) {
      nn::attention_backward(model.phi_attention[j], groups.unique_left,
                             c.phi_left_cache[j], grad_dif, nullptr, nullptr);
      nn::attention_backward(model.phi_attention[j], groups.unique_right,
                             c.phi_right_cache[j], grad_dif, nullptr, nullptr);
      nn::attention_backward(model.psi_attention[j], groups.shared, c.psi_cache[j],
                             grad_sim, nullptr, nullptr);
    } else {  // context-attention: the query path feeds extra gradient into sim
      Vec grad_query(s, 0.0);
      nn::attention_backward(model.phi_attention[j], groups.unique_left,
                             c.phi_left_cache[j], grad_dif, nullptr, &grad_query);
      nn::attention_backward(model.phi_attention[j], groups.unique_right,
                             c.phi_right_cache[j], grad_dif, nullptr, &grad_query);
      nn::axpy(1.0, grad_query, grad_sim);
      nn::attention_backward(model.psi_attention[j], groups.shared, c.psi_cache[j],
                             grad_sim, nullptr, nullptr);
    }
  }
  return ce.loss;
}

// ---------------------------------------------------------------------------
// Twin-sum baseline: no contrast. Each record's tokens are summed per
// attribute and affinely mapped with weights shared between the two records;
// the summaries are compared by absolute difference.
// ---------------------------------------------------------------------------

struct TwinForwardCache {
  std::vector<Vec> left_sum, right_sum;  // m × d
  std::vector<Vec> left_out, right_out;  // m × s
  Vec mlp_in, hidden_pre, hidden, logits, probs;
  double score = 0;
};

inline double twin_forward_score(const Model& model, const TwinEmbeddedPair& tp,
                                 TwinForwardCache* cache = nullptr) {
  nn::require(model.config.variant == Variant::kTwinSum,
              "twin_forward_score needs a twin-sum model");
  nn::require(tp.per_attribute.size() == std::size_t(model.config.attribute_count),
              "pair attribute count does not match model");
  nn::require(tp.dim == model.config.embedding_dim, "embedding dim does not match model");
  TwinForwardCache local;
  TwinForwardCache& c = cache ? *cache : local;
  c = TwinForwardCache{};

  const auto& cfg = model.config;
  const int m = cfg.attribute_count;
  c.left_sum.resize(m);
  c.right_sum.resize(m);
  c.left_out.resize(m);
  c.right_out.resize(m);
  c.mlp_in.clear();
  for (int j = 0; j < m; ++j) {
    c.left_sum[j] = detail::sum_vectors(tp.per_attribute[j].left, cfg.embedding_dim);
    c.right_sum[j] = detail::sum_vectors(tp.per_attribute[j].right, cfg.embedding_dim);
    c.left_out[j] = nn::matvec(model.twin_weight[j], c.left_sum[j]);
    c.right_out[j] = nn::matvec(model.twin_weight[j], c.right_sum[j]);
    for (int k = 0; k < cfg.sim_dif_dim; ++k) {
      c.mlp_in.push_back(std::abs(c.left_out[j][k] - c.right_out[j][k]));
    }
  }
  c.hidden_pre = model.mlp_hidden.forward(c.mlp_in);
  c.hidden = nn::relu(c.hidden_pre);
  c.logits = model.mlp_out.forward(c.hidden);
  c.probs = nn::softmax(c.logits);
  c.score = c.probs[1];
  return c.score;
}

inline double twin_backward(Model& model, const TwinForwardCache& c, int label) {
  nn::require(model.config.variant == Variant::kTwinSum,
              "twin_backward needs a twin-sum model");
  nn::require(!c.logits.empty(), "twin_backward: stale or empty forward cache");
  const auto& cfg = model.config;
  const int m = cfg.attribute_count;
  const int s = cfg.sim_dif_dim;

  auto ce = nn::cross_entropy(c.logits, label);
  Vec grad_hidden(cfg.hidden_dim, 0.0);
  model.mlp_out.backward(c.hidden, ce.grad_logits, &grad_hidden);
  Vec grad_hidden_pre = nn::relu_backward(c.hidden_pre, grad_hidden);
  Vec grad_mlp_in(c.mlp_in.size(), 0.0);
  model.mlp_hidden.backward(c.mlp_in, grad_hidden_pre, &grad_mlp_in);

  for (int j = 0; j < m; ++j) {
    Vec grad_left(s), grad_right(s);
    for (int k = 0; k < s; ++k) {
      double delta = c.left_out[j][k] - c.right_out[j][k];
      double sign = delta > 0 ? 1.0 : (delta < 0 ? -1.0 : 0.0);
      double gf = grad_mlp_in[std::size_t(j) * s + k];
      grad_left[k] = gf * sign;
      grad_right[k] = -gf * sign;
    }
    nn::matvec_backward(model.twin_weight[j], c.left_sum[j], grad_left, nullptr);
    nn::matvec_backward(model.twin_weight[j], c.right_sum[j], grad_right, nullptr);
  }
  return ce.loss;
}

// ---------------------------------------------------------------------------
// Checkpoints: magic, version, JSON header (config + training metadata +
// parameter directory), then raw little-endian float64 arrays in registry
// order. Round trips are bit-exact.
// ---------------------------------------------------------------------------

inline constexpr char kCheckpointMagic[8] = {'C', 'O', 'R', 'D', 'E', 'L', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TrainMeta {
  int best_epoch = 0;
  double valid_f1 = 0;  // percent, at threshold 0.5
  std::uint64_t train_seed = 0;
  std::uint64_t split_seed = 0;  // 3:1:1 split of flat pair lists
  double threshold = 0.5;
  std::vector<std::string> attributes;  // schema the model was trained on
  std::string embedding_mode = "hashed";  // "hashed" | "file"
  int embedding_dim = 0;
  std::uint64_t embedding_seed = 0;
  std::uint64_t oov_seed = 0;
  std::string embedding_source;  // path of the vector file when mode == "file"
};

namespace detail {

using nlohmann::json;

inline json config_to_json(const ModelConfig& c) {
  return json{{"variant", variant_name(c.variant)},
              {"attribute_count", c.attribute_count},
              {"embedding_dim", c.embedding_dim},
              {"sim_dif_dim", c.sim_dif_dim},
              {"hidden_dim", c.hidden_dim},
              {"d1_trainable_q", c.d1_trainable_q},
              {"d1_context", c.d1_context},
              {"d2", c.d2},
              {"omega_self_attention", c.omega_self_attention},
              {"seed", c.seed}};
}

inline ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.variant = variant_from_name(j.at("variant").get<std::string>());
  c.attribute_count = j.at("attribute_count").get<int>();
  c.embedding_dim = j.at("embedding_dim").get<int>();
  c.sim_dif_dim = j.at("sim_dif_dim").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.d1_trainable_q = j.at("d1_trainable_q").get<int>();
  c.d1_context = j.at("d1_context").get<int>();
  c.d2 = j.at("d2").get<int>();
  c.omega_self_attention = j.at("omega_self_attention").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

inline json meta_to_json(const TrainMeta& m) {
  return json{{"best_epoch", m.best_epoch},
              {"valid_f1", m.valid_f1},
              {"train_seed", m.train_seed},
              {"split_seed", m.split_seed},
              {"threshold", m.threshold},
              {"attributes", m.attributes},
              {"embedding_mode", m.embedding_mode},
              {"embedding_dim", m.embedding_dim},
              {"embedding_seed", m.embedding_seed},
              {"oov_seed", m.oov_seed},
              {"embedding_source", m.embedding_source}};
}

inline TrainMeta meta_from_json(const json& j) {
  TrainMeta m;
  m.best_epoch = j.at("best_epoch").get<int>();
  m.valid_f1 = j.at("valid_f1").get<double>();
  m.train_seed = j.at("train_seed").get<std::uint64_t>();
  m.split_seed = j.at("split_seed").get<std::uint64_t>();
  m.threshold = j.at("threshold").get<double>();
  m.attributes = j.at("attributes").get<std::vector<std::string>>();
  m.embedding_mode = j.at("embedding_mode").get<std::string>();
  m.embedding_dim = j.at("embedding_dim").get<int>();
  m.embedding_seed = j.at("embedding_seed").get<std::uint64_t>();
  m.oov_seed = j.at("oov_seed").get<std::uint64_t>();
  m.embedding_source = j.at("embedding_source").get<std::string>();
  return m;
}

inline std::uint64_t to_le64(std::uint64_t x) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t y = 0;
    for (int i = 0; i < 8; ++i) y = (y << 8) | ((x >> (8 * i)) & 0xffu);
    return y;
  }
  return x;
}

inline void put_u32(std::string& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(char((x >> (8 * i)) & 0xffu));
}

inline void put_u64(std::string& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(char((x >> (8 * i)) & 0xffu));
}

inline std::uint32_t get_u32(const std::string& s, std::size_t pos) {
  std::uint32_t x = 0;
  for (int i = 3; i >= 0; --i) x = (x << 8) | std::uint8_t(s[pos + i]);
  return x;
}

inline std::uint64_t get_u64(const std::string& s, std::size_t pos) {
  std::uint64_t x = 0;
  for (int i = 7; i >= 0; --i) x = (x << 8) | std::uint8_t(s[pos + i]);
  return x;
}

}  // namespace detail

inline void save_checkpoint(const Model& model, const TrainMeta& meta,
                            const std::filesystem::path& path) {
  Model& mutable_model = const_cast<Model&>(model);
  auto params = mutable_model.params();

  detail::json header;
  header["config"] = detail::config_to_json(model.config);
  header["meta"] = detail::meta_to_json(meta);
  detail::json dir = detail::json::array();
  for (const auto& p : params) {
    dir.push_back({{"name", p.name}, {"rows", p.tensor->rows}, {"cols", p.tensor->cols}});
  }
  header["params"] = dir;
  const std::string header_text = header.dump();

  std::string out;
  out.append(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u64(out, header_text.size());
  out += header_text;
  for (const auto& p : params) {
    for (double x : p.tensor->v) {
      std::uint64_t bits = detail::to_le64(std::bit_cast<std::uint64_t>(x));
      out.append(reinterpret_cast<const char*>(&bits), 8);
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) throw std::runtime_error("failed to write checkpoint: " + path.string());
}

inline std::pair<Model, TrainMeta> load_checkpoint(
    const std::filesystem::path& path, std::optional<Variant> expected = std::nullopt) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string bytes = buf.str();

  const std::string corrupt = "corrupt checkpoint: " + path.string();
  if (bytes.size() < sizeof(kCheckpointMagic) + 4 + 8) throw std::runtime_error(corrupt);
  if (std::memcmp(bytes.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0) {
    throw std::runtime_error(corrupt + " (bad magic)");
  }
  std::uint32_t version = detail::get_u32(bytes, sizeof(kCheckpointMagic));
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) +
                             " in " + path.string());
  }
  std::size_t pos = sizeof(kCheckpointMagic) + 4;
  std::uint64_t header_size = detail::get_u64(bytes, pos);
  pos += 8;
  if (pos + header_size > bytes.size()) throw std::runtime_error(corrupt + " (truncated header)");

  detail::json header;
  try {
    header = detail::json::parse(bytes.substr(pos, header_size));
  } catch (const std::exception&) {
    throw std::runtime_error(corrupt + " (unreadable header)");
  }
  pos += header_size;

  ModelConfig config;
  TrainMeta meta;
  try {
    config = detail::config_from_json(header.at("config"));
    meta = detail::meta_from_json(header.at("meta"));
  } catch (const std::exception&) {
    throw std::runtime_error(corrupt + " (incomplete header)");
  }
  if (expected && config.variant != *expected) {
    throw std::runtime_error("checkpoint holds a " + variant_name(config.variant) +
                             " model, expected " + variant_name(*expected));
  }

  Model model = init_model(config);
  auto params = model.params();
  const auto& dir = header.at("params");
  if (!dir.is_array() || dir.size() != params.size()) {
    throw std::runtime_error(corrupt + " (parameter directory mismatch)");
  }
  std::size_t total_values = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& entry = dir[i];
    if (entry.at("name").get<std::string>() != params[i].name ||
        entry.at("rows").get<int>() != params[i].tensor->rows ||
        entry.at("cols").get<int>() != params[i].tensor->cols) {
      throw std::runtime_error(corrupt + " (parameter " + params[i].name + " mismatch)");
    }
    total_values += params[i].tensor->size();
  }
  if (bytes.size() - pos != total_values * 8) {
    throw std::runtime_error(corrupt + " (truncated data section)");
  }
  for (auto& p : params) {
    for (auto& x : p.tensor->v) {
      std::uint64_t bits;
      std::memcpy(&bits, bytes.data() + pos, 8);
      x = std::bit_cast<double>(detail::to_le64(bits));
      pos += 8;
    }
  }
  return {std::move(model), std::move(meta)};
}

}  // namespace cordel
