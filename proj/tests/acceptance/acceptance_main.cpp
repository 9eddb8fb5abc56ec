// Acceptance suite. Each criterion prints one PASS/FAIL line; the exit code
// is the number of failed criteria. Run all criteria with no arguments,
// one with --criterion N, or list them with --list.
//
// Criteria 2, 3, 4 and 8 evaluate the public entity-matching benchmarks
// (Fodors-Zagats, iTunes-Amazon1, DBLP-ACM1) with pretrained 300-d word
// vectors. Those inputs are not redistributable here; point CORDEL_BENCH_ROOT
// at a directory holding the dataset folders (tableA/tableB/train/valid/test
// CSV layout) and CORDEL_EMBEDDINGS at a 300-d vector text file, otherwise
// the criteria fail with a message saying exactly what is missing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cordel/data_model.hpp"
#include "cordel/embeddings.hpp"
#include "cordel/lim.hpp"
#include "cordel/metrics.hpp"
#include "cordel/models.hpp"
#include "cordel/nn.hpp"
#include "cordel/train_eval.hpp"
#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace cordel;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

fs::path bench_root() {
#ifdef CORDEL_SOURCE_ROOT
  std::string fallback = std::string(CORDEL_SOURCE_ROOT) + "/data/benchmarks";
#else
  std::string fallback = "data/benchmarks";
#endif
  return env_or("CORDEL_BENCH_ROOT", fallback);
}

std::optional<fs::path> find_dataset(const std::vector<std::string>& candidates) {
  for (const auto& name : candidates) {
    fs::path p = bench_root() / name;
    if (fs::exists(p / "tableA.csv")) return p;
  }
  return std::nullopt;
}

std::string missing_inputs_message(const std::vector<std::string>& candidates) {
  std::string names;
  for (const auto& c : candidates) names += (names.empty() ? "" : "|") + c;
  return "benchmark data not found under " + bench_root().string() + " (tried " + names +
         "); set CORDEL_BENCH_ROOT to the benchmark directory and CORDEL_EMBEDDINGS to a "
         "300-d word-vector file";
}

// Shared protocol for the real-data criteria: sum variant, pretrained 300-d
// vectors, Adam lr 1e-4, batch 64.
struct BenchmarkRun {
  double test_f1 = 0;
  std::size_t pairs = 0;
};

BenchmarkRun run_benchmark(const fs::path& dir, const EmbeddingStore& store, int epochs,
                           std::uint64_t seed) {
  Dataset ds = load_benchmark_dataset(dir);
  ModelConfig config;
  config.variant = Variant::kSum;
  config.attribute_count = int(ds.schema.size());
  config.embedding_dim = store.dim();
  config.seed = seed;
  Model model = init_model(config);

  TrainConfig tc;
  tc.learning_rate = 1e-4;
  tc.batch_size = 64;
  tc.epochs = epochs;
  tc.seed = seed;
  train(model, ds, store, tc);

  auto scores = predict_scores(model, ds.test, ds.schema, store);
  BenchmarkRun run;
  run.test_f1 = f1_at_threshold(scores, labels_of(ds.test), 0.5).f1;
  run.pairs = ds.train.size() + ds.valid.size() + ds.test.size();
  return run;
}

Outcome benchmark_criterion(const std::vector<std::string>& dataset_names, double f1_floor,
                            int epochs) {
  auto dir = find_dataset(dataset_names);
  if (!dir) return {false, missing_inputs_message(dataset_names)};
  std::string emb = env_or("CORDEL_EMBEDDINGS", "");
  if (emb.empty() || !fs::exists(emb)) {
    return {false, "pretrained 300-d embeddings required: set CORDEL_EMBEDDINGS to a "
                   "word-vector text file"};
  }
  EmbeddingStore store = load_word_embeddings(emb, 300, OovPolicy::kHashedGaussian, 0);
  BenchmarkRun run = run_benchmark(*dir, store, epochs, 1);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "test f1 %.1f (floor %.1f) on %zu pairs", run.test_f1,
                f1_floor, run.pairs);
  return {run.test_f1 >= f1_floor, buf};
}

// Random token-level pairs. Gradient checking needs a differentiable
// evaluation point, so every attribute keeps non-empty shared and unique
// groups (an empty group parks a ReLU pre-activation exactly on its kink).
LabeledPair random_token_pair(std::mt19937_64& g, int attributes) {
  static const char* kWords[] = {"alpha", "beta",  "gamma", "delta", "epsilon", "zeta",
                                 "eta",   "theta", "iota",  "kappa", "12",      "8"};
  static const char* kLeftOnly[] = {"l1", "l2", "l3", "l4", "l5"};
  static const char* kRightOnly[] = {"r1", "r2", "r3", "r4", "r5"};
  LabeledPair pair;
  for (int j = 0; j < attributes; ++j) {
    std::string shared;
    std::size_t n = 1 + rng::bounded(g, 5);
    for (std::size_t i = 0; i < n; ++i) {
      if (!shared.empty()) shared += " ";
      shared += kWords[rng::bounded(g, std::size(kWords))];
    }
    pair.left.values.push_back(shared + " " + kLeftOnly[rng::bounded(g, 5)]);
    pair.right.values.push_back(shared + " " + kRightOnly[rng::bounded(g, 5)]);
  }
  pair.label = int(rng::bounded(g, 2));
  return pair;
}

ModelConfig toy_config(Variant v, std::uint64_t seed) {
  ModelConfig config;
  config.variant = v;
  config.attribute_count = 2;
  config.embedding_dim = 8;
  config.sim_dif_dim = 5;
  config.hidden_dim = 7;
  config.d1_trainable_q = 3;
  config.d1_context = 5;
  config.d2 = 5;
  config.seed = seed;
  return config;
}

// 1. Sum-variant parameter count, m=10, d=300: exactly 713,730.
Outcome criterion_param_count() {
  ModelConfig config;
  config.variant = Variant::kSum;
  config.attribute_count = 10;
  config.embedding_dim = 300;
  const std::size_t want = 713730;
  std::size_t closed = expected_param_count(config);
  std::size_t registry = init_model(config).param_count();
  char buf[128];
  std::snprintf(buf, sizeof(buf), "closed form %zu, registry %zu, required %zu", closed,
                registry, want);
  return {closed == want && registry == want, buf};
}

// 2-4. Public benchmark F1 floors.
Outcome criterion_fodors_zagats() {
  return benchmark_criterion({"fodors_zagats", "Fodors-Zagats", "fodors-zagats"}, 95.0, 40);
}

Outcome criterion_itunes_amazon() {
  return benchmark_criterion({"itunes_amazon1", "iTunes-Amazon1", "itunes-amazon1",
                              "itunes_amazon", "iTunes-Amazon"}, 88.0, 40);
}

Outcome criterion_dblp_acm() {
  return benchmark_criterion({"dblp_acm1", "DBLP-ACM1", "dblp-acm1", "dblp_acm", "DBLP-ACM"},
                             96.0, 15);
}

// 5. Contrast beats the twin baseline by >= 10 F1 on the numeric-difference
// corpus, both trained identically.
Outcome criterion_twin_direction() {
  auto pairs = synthetic::numeric_difference_corpus({2000, 11});
  auto split = split_pairs(pairs, {3, 1, 1}, 5);
  Dataset ds;
  ds.name = "numeric-difference";
  ds.schema = synthetic::product_schema();
  ds.train = std::move(split.train);
  ds.valid = std::move(split.valid);
  ds.test = std::move(split.test);
  EmbeddingStore store = EmbeddingStore::hashed(64, 0);

  auto run = [&](Variant v) {
    ModelConfig config;
    config.variant = v;
    config.attribute_count = 2;
    config.embedding_dim = 64;
    config.seed = 1;
    Model model = init_model(config);
    TrainConfig tc;
    tc.learning_rate = 1e-4;
    tc.batch_size = 64;
    tc.epochs = 10;
    tc.seed = 1;
    train(model, ds, store, tc);
    auto scores = predict_scores(model, ds.test, ds.schema, store);
    return f1_at_threshold(scores, labels_of(ds.test), 0.5).f1;
  };
  double contrast_f1 = run(Variant::kSum);
  double twin_f1 = run(Variant::kTwinSum);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "contrast f1 %.1f vs twin f1 %.1f, gap %.1f (need >= 10)",
                contrast_f1, twin_f1, contrast_f1 - twin_f1);
  return {contrast_f1 - twin_f1 >= 10.0, buf};
}

// 6. End-to-end gradients vs central finite differences, every variant,
// five seeds.
Outcome criterion_gradients() {
  Schema schema({"a1", "a2"});
  double worst = 0;
  std::string worst_at = "none";
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EmbeddingStore store = EmbeddingStore::hashed(8, seed);
    std::mt19937_64 g(rng::mix(seed, 0xacce97));
    LabeledPair pair = random_token_pair(g, 2);
    for (Variant v : {Variant::kSum, Variant::kAttention, Variant::kContextAttention,
                      Variant::kTwinSum}) {
      Model model = init_model(toy_config(v, seed));
      auto params = model.params();
      nn::zero_grads(params);
      double err = 0;
      if (v == Variant::kTwinSum) {
        auto tp = embed_pair_tokens(store, schema, pair);
        TwinForwardCache cache;
        twin_forward_score(model, tp, &cache);
        twin_backward(model, cache, pair.label);
        err = nn::grad_check(
            [&]() {
              TwinForwardCache c;
              twin_forward_score(model, tp, &c);
              return nn::cross_entropy(c.logits, pair.label).loss;
            },
            params, 1e-5);
      } else {
        auto ep = embed_contrasted_pair(store, contrast_pair(pair, schema));
        ForwardCache cache;
        forward_score(model, ep, &cache);
        backward(model, ep, cache, pair.label);
        err = nn::grad_check(
            [&]() {
              ForwardCache c;
              forward_score(model, ep, &c);
              return nn::cross_entropy(c.logits, pair.label).loss;
            },
            params, 1e-5);
      }
      if (err > worst) {
        worst = err;
        worst_at = variant_name(v) + "/seed" + std::to_string(seed);
      }
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max relative error %.3g at %s (need < 1e-4)", worst,
                worst_at.c_str());
  return {worst < 1e-4, buf};
}

// 7. PRAUC and threshold calibration match exhaustive oracles exactly on
// 1,000 random instances with n <= 12, plus the fixed F1 example.
Outcome criterion_metric_oracles() {
  auto fixed = f1_at_threshold({0.9, 0.2, 0.7}, {1, 0, 0}, 0.5);
  if (std::abs(std::round(fixed.f1 * 10.0) / 10.0 - 66.7) > 1e-9) {
    return {false, "fixed F1 example produced " + std::to_string(fixed.f1)};
  }
  std::mt19937_64 g(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng::bounded(g, 12);
    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
      scores.push_back(double(rng::bounded(g, 9)) / 8.0);
      labels.push_back(int(rng::bounded(g, 2)));
    }
    if (std::count(labels.begin(), labels.end(), 1) == 0) labels[rng::bounded(g, n)] = 1;

    double ap = prauc(pr_curve(scores, labels));
    double ap_ref = oracle::average_precision_reference(scores, labels);
    if (ap != ap_ref) {
      return {false, "prauc mismatch at trial " + std::to_string(trial)};
    }
    auto cal = calibrate_threshold(scores, labels);
    auto cal_ref = oracle::calibrate_reference(scores, labels);
    if (cal.threshold != cal_ref.threshold || cal.f1 != cal_ref.f1) {
      return {false, "calibration mismatch at trial " + std::to_string(trial)};
    }
  }
  return {true, "1000 instances exact, fixed example rounds to 66.7"};
}

// 8. Stability proxy: 10 iTunes-Amazon1 runs, seeds 0-9, test-F1 stddev <= 5.
Outcome criterion_stability() {
  const std::vector<std::string> names = {"itunes_amazon1", "iTunes-Amazon1",
                                          "itunes-amazon1", "itunes_amazon",
                                          "iTunes-Amazon"};
  auto dir = find_dataset(names);
  if (!dir) return {false, missing_inputs_message(names)};
  std::string emb = env_or("CORDEL_EMBEDDINGS", "");
  if (emb.empty() || !fs::exists(emb)) {
    return {false, "pretrained 300-d embeddings required: set CORDEL_EMBEDDINGS to a "
                   "word-vector text file"};
  }
  EmbeddingStore store = load_word_embeddings(emb, 300, OovPolicy::kHashedGaussian, 0);
  std::vector<double> f1s;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    f1s.push_back(run_benchmark(*dir, store, 40, seed).test_f1);
  }
  double mean = 0;
  for (double f : f1s) mean += f;
  mean /= double(f1s.size());
  double var = 0;
  for (double f : f1s) var += (f - mean) * (f - mean);
  double sd = std::sqrt(var / double(f1s.size()));
  char buf[128];
  std::snprintf(buf, sizeof(buf), "mean f1 %.1f, stddev %.2f over 10 seeds (need <= 5)",
                mean, sd);
  return {sd <= 5.0, buf};
}

// 9. Token-contrast partition, disjointness and symmetry on 10,000 random
// token-list pairs.
Outcome criterion_lim_properties() {
  static const char* kWords[] = {"a", "b", "c", "d", "e", "f", "12", "8", "x-1", "x.2"};
  std::mt19937_64 g(99);
  auto random_list = [&]() {
    std::vector<std::string> tokens;
    std::size_t n = rng::bounded(g, 11);
    for (std::size_t i = 0; i < n; ++i) tokens.push_back(kWords[rng::bounded(g, 10)]);
    return tokens;
  };
  auto as_set = [](const std::vector<std::string>& v) {
    return std::set<std::string>(v.begin(), v.end());
  };
  for (int trial = 0; trial < 10000; ++trial) {
    auto left = random_list();
    auto right = random_list();
    auto t = contrast_attribute(left, right);
    auto shared = as_set(t.shared);
    auto ul = as_set(t.unique_left);
    auto ur = as_set(t.unique_right);
    auto fail = [&](const char* what) {
      return Outcome{false, std::string(what) + " violated at trial " + std::to_string(trial)};
    };
    if (shared.size() != t.shared.size() || ul.size() != t.unique_left.size() ||
        ur.size() != t.unique_right.size()) {
      return fail("deduplication");
    }
    for (const auto& x : shared) {
      if (ul.count(x) || ur.count(x)) return fail("shared/unique disjointness");
    }
    for (const auto& x : ul) {
      if (ur.count(x)) return fail("unique/unique disjointness");
    }
    std::set<std::string> left_rebuilt = shared, right_rebuilt = shared;
    left_rebuilt.insert(ul.begin(), ul.end());
    right_rebuilt.insert(ur.begin(), ur.end());
    if (left_rebuilt != as_set(left) || right_rebuilt != as_set(right)) {
      return fail("partition");
    }
    auto s = contrast_attribute(right, left);
    if (as_set(s.shared) != shared || as_set(s.unique_left) != ur ||
        as_set(s.unique_right) != ul) {
      return fail("symmetry");
    }
  }
  return {true, "10000 randomized pairs hold all invariants"};
}

// 10. Checkpoint round trip: scores bitwise identical on 100 random pairs.
Outcome criterion_checkpoint_roundtrip() {
  Schema schema({"a1", "a2", "a3"});
  EmbeddingStore store = EmbeddingStore::hashed(16, 7);
  ModelConfig config;
  config.variant = Variant::kSum;
  config.attribute_count = 3;
  config.embedding_dim = 16;
  config.seed = 7;
  Model model = init_model(config);

  fs::path path = fs::temp_directory_path() / "cordel_acceptance_roundtrip.ckpt";
  TrainMeta meta;
  meta.attributes = schema.attributes;
  meta.embedding_mode = "hashed";
  meta.embedding_dim = 16;
  meta.embedding_seed = 7;
  save_checkpoint(model, meta, path);
  auto [loaded, loaded_meta] = load_checkpoint(path);
  fs::remove(path);

  std::mt19937_64 g(77);
  for (int trial = 0; trial < 100; ++trial) {
    LabeledPair pair = random_token_pair(g, 3);
    auto ep = embed_contrasted_pair(store, contrast_pair(pair, schema));
    double a = forward_score(model, ep);
    double b = forward_score(loaded, ep);
    if (a != b) {
      return {false, "score drift at trial " + std::to_string(trial)};
    }
  }
  return {true, "100 random pairs score bitwise identically after save/load"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "parameter-count reproduction (sum variant m=10 d=300 = 713730)", 1,
       criterion_param_count},
      {2, "fodors-zagats test F1 >= 95.0", 300, criterion_fodors_zagats},
      {3, "itunes-amazon1 test F1 >= 88.0", 300, criterion_itunes_amazon},
      {4, "dblp-acm1 test F1 >= 96.0", 1200, criterion_dblp_acm},
      {5, "contrast beats twin baseline by >= 10 F1 on numeric-difference corpus", 120,
       criterion_twin_direction},
      {6, "gradient suite < 1e-4 for every variant across 5 seeds", 60,
       criterion_gradients},
      {7, "metric oracles exact on 1000 instances (n <= 12)", 60, criterion_metric_oracles},
      {8, "itunes-amazon1 stability: F1 stddev <= 5 over seeds 0-9", 1800,
       criterion_stability},
      {9, "token-contrast property suite on 10000 randomized pairs", 10,
       criterion_lim_properties},
      {10, "checkpoint round trip bitwise over 100 pairs", 10,
       criterion_checkpoint_roundtrip},
  };
  return all;
}

int run_one(const Criterion& c) {
  auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = c.run();
  } catch (const std::exception& e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (outcome.pass && seconds > c.budget_seconds) {
    outcome.pass = false;
    outcome.detail += " [over the " + std::to_string(int(c.budget_seconds)) + "s budget]";
  }
  std::printf("[%s] criterion %d: %s (%.1fs, budget %.0fs): %s\n",
              outcome.pass ? "PASS" : "FAIL", c.id, c.name, seconds, c.budget_seconds,
              outcome.detail.c_str());
  std::fflush(stdout);
  return outcome.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::optional<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--list") == 0) {
      for (const auto& c : criteria()) std::printf("%d: %s\n", c.id, c.name);
      return 0;
    }
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--list] [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  int failures = 0;
  bool matched = false;
  for (const auto& c : criteria()) {
    if (only && c.id != *only) continue;
    matched = true;
    failures += run_one(c);
  }
  if (!matched) {
    std::fprintf(stderr, "no criterion %d\n", *only);
    return 2;
  }
  return failures;
}
