#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "cordel/rng.hpp"

// Minimal differentiable-layer toolkit: affine maps, ReLU, softmax, scaled
// dot-product attention, two-class cross-entropy, Adam, and a central
// finite-difference gradient checker. Everything is 64-bit, shape-checked and
// deterministic; backward passes accumulate (+=) into gradient buffers so
// batches can be averaged by the caller.

namespace cordel::nn {

using Vec = std::vector<double>;

struct Tensor {
  int rows = 0;
  int cols = 1;
  Vec v;  // values, row-major
  Vec g;  // gradient, same layout

  Tensor() = default;
  Tensor(int r, int c)
      : rows(r), cols(c), v(std::size_t(r) * std::size_t(c), 0.0),
        g(std::size_t(r) * std::size_t(c), 0.0) {
    if (r <= 0 || c <= 0) throw std::invalid_argument("tensor dims must be positive");
  }

  std::size_t size() const { return v.size(); }
  double& at(int r, int c) { return v[std::size_t(r) * cols + c]; }
  double at(int r, int c) const { return v[std::size_t(r) * cols + c]; }
  void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }
};

// Named view into a model's trainable tensors; the registry order is the
// canonical parameter order for optimizers, checkpoints and grad checks.
struct ParamRef {
  std::string name;
  Tensor* tensor = nullptr;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

inline double dot(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void axpy(double alpha, const Vec& x, Vec& y) {
  require(x.size() == y.size(), "axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// y = W x
inline Vec matvec(const Tensor& w, const Vec& x) {
  require(x.size() == std::size_t(w.cols), "matvec: input length mismatch");
  Vec y(w.rows, 0.0);
  for (int r = 0; r < w.rows; ++r) {
    const double* row = &w.v[std::size_t(r) * w.cols];
    double s = 0;
    for (int c = 0; c < w.cols; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

// grad_w += gy ⊗ x; optionally grad_x += W^T gy
inline void matvec_backward(Tensor& w, const Vec& x, const Vec& gy, Vec* gx) {
  require(gy.size() == std::size_t(w.rows), "matvec_backward: output grad length mismatch");
  require(x.size() == std::size_t(w.cols), "matvec_backward: input length mismatch");
  for (int r = 0; r < w.rows; ++r) {
    double* grow = &w.g[std::size_t(r) * w.cols];
    const double gr = gy[r];
    for (int c = 0; c < w.cols; ++c) grow[c] += gr * x[c];
  }
  if (gx) {
    require(gx->size() == std::size_t(w.cols), "matvec_backward: input grad length mismatch");
    for (int r = 0; r < w.rows; ++r) {
      const double* row = &w.v[std::size_t(r) * w.cols];
      const double gr = gy[r];
      for (int c = 0; c < w.cols; ++c) (*gx)[c] += row[c] * gr;
    }
  }
}

struct Affine {
  Tensor w;  // out×in
  Tensor b;  // out×1

  Affine() = default;
  Affine(int out, int in) : w(out, in), b(out, 1) {}

  int in_dim() const { return w.cols; }
  int out_dim() const { return w.rows; }

  Vec forward(const Vec& x) const {
    Vec y = matvec(w, x);
    for (int r = 0; r < w.rows; ++r) y[r] += b.v[r];
    return y;
  }

  void backward(const Vec& x, const Vec& gy, Vec* gx) {
    matvec_backward(w, x, gy, gx);
    for (int r = 0; r < w.rows; ++r) b.g[r] += gy[r];
  }
};

inline Vec relu(const Vec& x) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0 ? x[i] : 0.0;
  return y;
}

// Subgradient 0 at 0: gy ⊙ 1[x > 0]
inline Vec relu_backward(const Vec& x_pre, const Vec& gy) {
  require(x_pre.size() == gy.size(), "relu_backward: length mismatch");
  Vec gx(x_pre.size());
  for (std::size_t i = 0; i < x_pre.size(); ++i) gx[i] = x_pre[i] > 0 ? gy[i] : 0.0;
  return gx;
}

// Stabilized by max subtraction; output is strictly positive and sums to 1.
inline Vec softmax(const Vec& x) {
  require(!x.empty(), "softmax: empty input");
  double m = *std::max_element(x.begin(), x.end());
  Vec y(x.size());
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(x[i] - m);
    total += y[i];
  }
  for (auto& v : y) v /= total;
  return y;
}

// grad_x = a ⊙ (gy − a·gy) where a = softmax(x)
inline Vec softmax_backward(const Vec& a, const Vec& gy) {
  require(a.size() == gy.size(), "softmax_backward: length mismatch");
  double inner = dot(a, gy);
  Vec gx(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) gx[i] = a[i] * (gy[i] - inner);
  return gx;
}

struct CrossEntropyResult {
  double loss = 0;
  Vec grad_logits;  // softmax(logits) − onehot(label)
};

inline CrossEntropyResult cross_entropy(const Vec& logits, int label) {
  require(logits.size() == 2, "cross_entropy: expects two logits");
  require(label == 0 || label == 1, "cross_entropy: label must be 0 or 1");
  // -log softmax(logits)[label] = softplus(z) with z the wrong-minus-right
  // logit margin; softplus keeps full precision when the loss is tiny.
  double z = logits[1 - label] - logits[label];
  CrossEntropyResult res;
  res.loss = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  res.grad_logits = softmax(logits);
  res.grad_logits[label] -= 1.0;
  return res;
}

// ---------------------------------------------------------------------------
// Scaled dot-product attention over a variable-length sequence of columns:
//   K = Wk X,  V = Wv X,  o = V · softmax(K^T q / sqrt(d1))
// The query is either a trainable parameter of the unit or supplied by the
// caller. An empty sequence yields the zero vector and no gradients.
// ---------------------------------------------------------------------------

enum class QueryMode { kTrainable, kExternal };

struct AttentionUnit {
  QueryMode mode = QueryMode::kTrainable;
  Tensor w_key;    // d1×d
  Tensor w_value;  // d2×d
  Tensor query;    // d1×1, only in trainable mode

  AttentionUnit() = default;
  AttentionUnit(int d1, int d2, int d, QueryMode m)
      : mode(m), w_key(d1, d), w_value(d2, d) {
    if (mode == QueryMode::kTrainable) query = Tensor(d1, 1);
  }

  int key_dim() const { return w_key.rows; }
  int value_dim() const { return w_value.rows; }
  int input_dim() const { return w_key.cols; }
};

struct AttentionCache {
  std::vector<Vec> keys;    // n × d1
  std::vector<Vec> values;  // n × d2
  Vec weights;              // softmax output, length n
  Vec q;                    // query that was used, length d1
};

inline Vec attention_forward(const AttentionUnit& unit, const std::vector<Vec>& xs,
                             const Vec* q_external, AttentionCache* cache) {
  if (unit.mode == QueryMode::kExternal) {
    require(q_external != nullptr, "attention: unit needs an external query");
    require(q_external->size() == std::size_t(unit.key_dim()),
            "attention: external query length mismatch");
  } else {
    require(q_external == nullptr, "attention: unit owns a trainable query");
  }
  const Vec& q = unit.mode == QueryMode::kExternal ? *q_external : unit.query.v;
  const std::size_t n = xs.size();
  if (cache) {
    cache->keys.clear();
    cache->values.clear();
    cache->weights.clear();
    cache->q = q;
  }
  if (n == 0) return Vec(unit.value_dim(), 0.0);

  const double scale = 1.0 / std::sqrt(double(unit.key_dim()));
  std::vector<Vec> keys(n), values(n);
  Vec scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = matvec(unit.w_key, xs[i]);
    values[i] = matvec(unit.w_value, xs[i]);
    scores[i] = dot(keys[i], q) * scale;
  }
  Vec weights = softmax(scores);
  Vec out(unit.value_dim(), 0.0);
  for (std::size_t i = 0; i < n; ++i) axpy(weights[i], values[i], out);
  if (cache) {
    cache->keys = std::move(keys);
    cache->values = std::move(values);
    cache->weights = std::move(weights);
  }
  return out;
}

// Accumulates parameter gradients into the unit; optionally accumulates input
// gradients into *grad_xs (same shapes as xs) and, in external-query mode, the
// query gradient into *grad_q_external.
inline void attention_backward(AttentionUnit& unit, const std::vector<Vec>& xs,
                               const AttentionCache& cache, const Vec& grad_out,
                               std::vector<Vec>* grad_xs, Vec* grad_q_external) {
  require(grad_out.size() == std::size_t(unit.value_dim()),
          "attention_backward: output grad length mismatch");
  const std::size_t n = xs.size();
  if (n == 0) return;  // output was identically zero
  require(cache.weights.size() == n, "attention_backward: stale cache");
  if (grad_xs) require(grad_xs->size() == n, "attention_backward: grad_xs shape mismatch");

  const double scale = 1.0 / std::sqrt(double(unit.key_dim()));
  Vec grad_weights(n);
  for (std::size_t i = 0; i < n; ++i) grad_weights[i] = dot(cache.values[i], grad_out);
  Vec grad_scores = softmax_backward(cache.weights, grad_weights);

  Vec grad_q(unit.key_dim(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    // value path: grad_v_i = weights[i] * grad_out
    Vec gv(unit.value_dim());
    for (int r = 0; r < unit.value_dim(); ++r) gv[r] = cache.weights[i] * grad_out[r];
    matvec_backward(unit.w_value, xs[i], gv, grad_xs ? &(*grad_xs)[i] : nullptr);
    // key path: grad_k_i = grad_scores[i] * q * scale
    Vec gk(unit.key_dim());
    for (int r = 0; r < unit.key_dim(); ++r) gk[r] = grad_scores[i] * cache.q[r] * scale;
    matvec_backward(unit.w_key, xs[i], gk, grad_xs ? &(*grad_xs)[i] : nullptr);
    // query path
    axpy(grad_scores[i] * scale, cache.keys[i], grad_q);
  }
  if (unit.mode == QueryMode::kTrainable) {
    for (int r = 0; r < unit.key_dim(); ++r) unit.query.g[r] += grad_q[r];
  } else if (grad_q_external) {
    require(grad_q_external->size() == grad_q.size(),
            "attention_backward: grad_q length mismatch");
    for (std::size_t r = 0; r < grad_q.size(); ++r) (*grad_q_external)[r] += grad_q[r];
  }
}

// ---------------------------------------------------------------------------
// Adam with bias correction. State arrays mirror the parameter registry.
// ---------------------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::int64_t step_count = 0;
  std::vector<Vec> m;
  std::vector<Vec> v;

  explicit AdamState(AdamConfig cfg = {}) : config(cfg) {}

  void init(const std::vector<ParamRef>& params) {
    m.clear();
    v.clear();
    for (const auto& p : params) {
      m.emplace_back(p.tensor->size(), 0.0);
      v.emplace_back(p.tensor->size(), 0.0);
    }
    step_count = 0;
  }

  // Applies one update from the gradients currently stored in the tensors.
  void step(const std::vector<ParamRef>& params) {
    require(params.size() == m.size(), "adam: state not initialized for these params");
    ++step_count;
    const double bc1 = 1.0 - std::pow(config.beta1, double(step_count));
    const double bc2 = 1.0 - std::pow(config.beta2, double(step_count));
    for (std::size_t p = 0; p < params.size(); ++p) {
      Tensor& t = *params[p].tensor;
      require(t.size() == m[p].size(), "adam: parameter shape changed");
      for (std::size_t i = 0; i < t.size(); ++i) {
        double grad = t.g[i];
        m[p][i] = config.beta1 * m[p][i] + (1.0 - config.beta1) * grad;
        v[p][i] = config.beta2 * v[p][i] + (1.0 - config.beta2) * grad * grad;
        double m_hat = m[p][i] / bc1;
        double v_hat = v[p][i] / bc2;
        t.v[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Gradient checking: central differences against the analytic gradients that
// the caller has already accumulated into the tensors' g buffers.
// ---------------------------------------------------------------------------

inline double grad_check(const std::function<double()>& loss_fn,
                         const std::vector<ParamRef>& params, double eps = 1e-5) {
  double max_rel = 0;
  for (const auto& p : params) {
    Tensor& t = *p.tensor;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double saved = t.v[i];
      t.v[i] = saved + eps;
      const double lp = loss_fn();
      t.v[i] = saved - eps;
      const double lm = loss_fn();
      t.v[i] = saved;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double analytic = t.g[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
    }
  }
  return max_rel;
}

inline void zero_grads(const std::vector<ParamRef>& params) {
  for (const auto& p : params) p.tensor->zero_grad();
}

inline void scale_grads(const std::vector<ParamRef>& params, double factor) {
  for (const auto& p : params) {
    for (auto& g : p.tensor->g) g *= factor;
  }
}

// ---------------------------------------------------------------------------
// Initialization, all driven by one explicit generator.
// ---------------------------------------------------------------------------

// Uniform on ±sqrt(6/(fan_in+fan_out)); fan_in = cols, fan_out = rows.
inline void glorot_uniform(Tensor& w, std::mt19937_64& g) {
  const double limit = std::sqrt(6.0 / double(w.cols + w.rows));
  for (auto& x : w.v) x = rng::uniform(g, -limit, limit);
}

// Standard normal scaled by 1/sqrt(d1) for trainable queries.
inline void query_normal(Tensor& q, std::mt19937_64& g) {
  const double s = 1.0 / std::sqrt(double(q.rows));
  for (auto& x : q.v) x = rng::gaussian(g) * s;
}

}  // namespace cordel::nn
