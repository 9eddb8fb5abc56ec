// Command-line front end: train, eval, predict, explain, gradcheck and
// vocab-extract subcommands over the library. Exit codes: 0 success,
// 1 runtime failure, 2 usage error.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cordel/data_model.hpp"
#include "cordel/embeddings.hpp"
#include "cordel/lim.hpp"
#include "cordel/manifest.hpp"
#include "cordel/metrics.hpp"
#include "cordel/models.hpp"
#include "cordel/nn.hpp"
#include "cordel/train_eval.hpp"

namespace fs = std::filesystem;
using namespace cordel;

namespace {

struct EmbeddingFlags {
  std::string file;
  int file_dim = 300;
  bool hashed = false;
  int hashed_dim = 64;
  std::uint64_t hashed_seed = 0;
  std::uint64_t oov_seed = 0;
};

void attach_embedding_flags(CLI::App* cmd, EmbeddingFlags& flags) {
  auto* file = cmd->add_option("--embeddings", flags.file,
                               "pretrained word-vector text file (token + values per line)");
  auto* hashed = cmd->add_flag("--hashed-embeddings", flags.hashed,
                               "deterministic per-token random vectors, no file needed");
  file->excludes(hashed);
  cmd->add_option("--emb-dim", flags.file_dim, "expected dimension of --embeddings")
      ->default_val(300);
  cmd->add_option("--hashed-dim", flags.hashed_dim, "dimension for --hashed-embeddings")
      ->default_val(64);
  cmd->add_option("--hashed-seed", flags.hashed_seed, "seed for --hashed-embeddings")
      ->default_val(0);
  cmd->add_option("--oov-seed", flags.oov_seed, "seed for out-of-vocabulary vectors")
      ->default_val(0);
}

EmbeddingStore make_store(const EmbeddingFlags& flags, TrainMeta& meta) {
  if (flags.hashed) {
    meta.embedding_mode = "hashed";
    meta.embedding_dim = flags.hashed_dim;
    meta.embedding_seed = flags.hashed_seed;
    meta.oov_seed = flags.hashed_seed;
    meta.embedding_source.clear();
    return EmbeddingStore::hashed(flags.hashed_dim, flags.hashed_seed);
  }
  meta.embedding_mode = "file";
  meta.embedding_dim = flags.file_dim;
  meta.embedding_seed = 0;
  meta.oov_seed = flags.oov_seed;
  meta.embedding_source = flags.file;
  return load_word_embeddings(flags.file, flags.file_dim, OovPolicy::kHashedGaussian,
                              flags.oov_seed);
}

// Rebuilds the store a checkpoint was trained with; hashed stores come back
// from metadata alone, file stores need the vector file (recorded path or
// --embeddings override).
EmbeddingStore store_for_checkpoint(const TrainMeta& meta, const std::string& override_path) {
  if (meta.embedding_mode == "hashed") {
    return EmbeddingStore::hashed(meta.embedding_dim, meta.embedding_seed);
  }
  std::string path = !override_path.empty() ? override_path : meta.embedding_source;
  if (path.empty() || !fs::exists(path)) {
    throw std::runtime_error(
        "checkpoint was trained with file embeddings; pass --embeddings PATH (recorded "
        "source: " + (meta.embedding_source.empty() ? "<none>" : meta.embedding_source) + ")");
  }
  return load_word_embeddings(path, meta.embedding_dim, OovPolicy::kHashedGaussian,
                              meta.oov_seed);
}

// --data accepts a benchmark directory (tableA/tableB + splits), a directory
// holding pairs.csv, or a flat pairs CSV file; flat pair lists are split
// 3:1:1 under split_seed.
Dataset load_any_dataset(const std::string& path, std::uint64_t split_seed) {
  fs::path p(path);
  if (fs::is_directory(p)) {
    if (fs::exists(p / "tableA.csv")) return load_benchmark_dataset(p);
    if (fs::exists(p / "pairs.csv")) p /= "pairs.csv";
    else throw std::runtime_error("no tableA.csv or pairs.csv in " + path);
  }
  auto [schema, pairs] = load_pairs_csv(p);
  auto split = split_pairs(pairs, {3, 1, 1}, split_seed);
  Dataset ds;
  ds.name = p.stem().string();
  ds.schema = std::move(schema);
  ds.train = std::move(split.train);
  ds.valid = std::move(split.valid);
  ds.test = std::move(split.test);
  return ds;
}

void check_schema(const TrainMeta& meta, const Schema& schema) {
  if (meta.attributes != schema.attributes) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& a : v) {
        if (!s.empty()) s += ",";
        s += a;
      }
      return s;
    };
    throw std::runtime_error("schema mismatch: checkpoint has (" + join(meta.attributes) +
                             "), dataset has (" + join(schema.attributes) + ")");
  }
}

MetricsReport evaluate_split(const Model& model, const EmbeddingStore& store,
                             const Dataset& ds, const std::vector<LabeledPair>& pairs,
                             double threshold, PRCurve* curve_out = nullptr) {
  auto scores = predict_scores(model, pairs, ds.schema, store);
  auto labels = labels_of(pairs);
  MetricsReport report = f1_at_threshold(scores, labels, threshold);
  if (std::count(labels.begin(), labels.end(), 1) > 0) {
    PRCurve curve = pr_curve(scores, labels);
    report.prauc = prauc(curve);
    report.recall_at_p95 = recall_at_precision(curve, 0.95);
    if (curve_out) *curve_out = std::move(curve);
  }
  return report;
}

void print_metrics(const std::string& split, const MetricsReport& r) {
  std::printf("split=%s f1=%.1f precision=%.1f recall=%.1f", split.c_str(), r.f1,
              100.0 * r.precision, 100.0 * r.recall);
  if (r.prauc >= 0) std::printf(" prauc=%.1f r_at_p95=%.1f", 100.0 * r.prauc,
                                100.0 * r.recall_at_p95);
  std::printf(" tp=%ld fp=%ld fn=%ld tn=%ld\n", r.tp, r.fp, r.fn, r.tn);
}

struct TrainOptions {
  std::string data;
  std::string variant = "sum";
  EmbeddingFlags embeddings;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> split_seed;
  int epochs = 20;
  int batch_size = 64;
  double learning_rate = 1e-4;
  std::string out = "model.ckpt";
  std::string manifest_path;
};

int run_train(const TrainOptions& opt) {
  if (opt.learning_rate == 0) {
    std::cerr << "warning: --lr 0, parameters will not change\n";
  }
  std::uint64_t split_seed = opt.split_seed.value_or(opt.seed);
  Dataset ds = load_any_dataset(opt.data, split_seed);

  TrainMeta meta;
  EmbeddingStore store = make_store(opt.embeddings, meta);

  ModelConfig config;
  config.variant = variant_from_name(opt.variant);
  config.attribute_count = int(ds.schema.size());
  config.embedding_dim = store.dim();
  config.seed = opt.seed;
  Model model = init_model(config);
  std::printf("dataset=%s train=%zu valid=%zu test=%zu attributes=%zu params=%zu\n",
              ds.name.c_str(), ds.train.size(), ds.valid.size(), ds.test.size(),
              ds.schema.size(), model.param_count());

  TrainConfig tc;
  tc.learning_rate = opt.learning_rate;
  tc.batch_size = opt.batch_size;
  tc.epochs = opt.epochs;
  tc.seed = opt.seed;
  TrainHistory history = train(model, ds, store, tc);
  for (const auto& e : history.epochs) {
    std::printf("epoch=%d train_loss=%.6f", e.epoch, e.train_loss);
    if (e.valid_f1 >= 0) std::printf(" valid_f1=%.1f", e.valid_f1);
    std::printf("\n");
  }
  std::printf("best_epoch=%d\n", history.best_epoch);

  meta.best_epoch = history.best_epoch;
  meta.valid_f1 = history.best_valid_f1 >= 0 ? history.best_valid_f1 : 0;
  meta.train_seed = opt.seed;
  meta.split_seed = split_seed;
  meta.threshold = 0.5;
  meta.attributes = ds.schema.attributes;

  if (!ds.valid.empty()) print_metrics("valid", evaluate_split(model, store, ds, ds.valid, 0.5));
  if (!ds.test.empty()) print_metrics("test", evaluate_split(model, store, ds, ds.test, 0.5));

  save_checkpoint(model, meta, opt.out);
  std::printf("checkpoint=%s\n", opt.out.c_str());

  RunManifest manifest;
  manifest.command = "train";
  manifest.flags = {{"data", opt.data},
                    {"variant", opt.variant},
                    {"embeddings", opt.embeddings.hashed
                                       ? "hashed(dim=" + std::to_string(opt.embeddings.hashed_dim) +
                                             ",seed=" + std::to_string(opt.embeddings.hashed_seed) + ")"
                                       : opt.embeddings.file},
                    {"seed", std::to_string(opt.seed)},
                    {"split-seed", std::to_string(split_seed)},
                    {"epochs", std::to_string(opt.epochs)},
                    {"batch-size", std::to_string(opt.batch_size)},
                    {"lr", std::to_string(opt.learning_rate)},
                    {"out", opt.out}};
  manifest.seed = opt.seed;
  manifest.dataset_name = ds.name;
  manifest.timestamp_utc = utc_timestamp();
  hash_inputs_into(manifest, opt.data);
  if (!opt.embeddings.file.empty()) hash_inputs_into(manifest, opt.embeddings.file);
  fs::path mpath = opt.manifest_path.empty() ? fs::path(opt.out + ".manifest.json")
                                             : fs::path(opt.manifest_path);
  write_manifest(manifest, mpath);
  return 0;
}

struct EvalOptions {
  std::string checkpoint;
  std::string data;
  std::string split = "test";
  double threshold = 0.5;
  std::string pr_out = "pr_curve.csv";
  std::string embeddings_override;
  std::string manifest_path;
};

int run_eval(const EvalOptions& opt) {
  auto [model, meta] = load_checkpoint(opt.checkpoint);
  Dataset ds = load_any_dataset(opt.data, meta.split_seed);
  check_schema(meta, ds.schema);
  EmbeddingStore store = store_for_checkpoint(meta, opt.embeddings_override);

  const auto& pairs = ds.split(opt.split);
  if (pairs.empty()) throw std::runtime_error("split \"" + opt.split + "\" is empty");
  PRCurve curve;
  MetricsReport report = evaluate_split(model, store, ds, pairs, opt.threshold, &curve);
  print_metrics(opt.split, report);
  if (!curve.points.empty()) {
    write_pr_csv(curve, opt.pr_out);
    std::printf("pr_curve=%s\n", opt.pr_out.c_str());
  }

  RunManifest manifest;
  manifest.command = "eval";
  manifest.flags = {{"checkpoint", opt.checkpoint},
                    {"data", opt.data},
                    {"split", opt.split},
                    {"threshold", std::to_string(opt.threshold)},
                    {"pr-out", opt.pr_out}};
  manifest.seed = meta.train_seed;
  manifest.dataset_name = ds.name;
  manifest.timestamp_utc = utc_timestamp();
  hash_inputs_into(manifest, opt.data);
  hash_inputs_into(manifest, opt.checkpoint);
  write_manifest(manifest, opt.manifest_path.empty() ? "eval.manifest.json"
                                                     : opt.manifest_path);
  return 0;
}

struct PredictOptions {
  std::string checkpoint;
  std::string pairs;
  std::string out = "scores.csv";
  std::string embeddings_override;
  std::string manifest_path;
};

int run_predict(const PredictOptions& opt) {
  auto [model, meta] = load_checkpoint(opt.checkpoint);
  auto [schema, pairs] = load_pairs_csv(opt.pairs);
  check_schema(meta, schema);
  EmbeddingStore store = store_for_checkpoint(meta, opt.embeddings_override);

  auto scores = predict_scores(model, pairs, schema, store);
  std::ofstream out(opt.out, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + opt.out);
  out << "id,score,match\n";
  char buf[64];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%d\n", i, scores[i],
                  scores[i] >= meta.threshold ? 1 : 0);
    out << buf;
  }
  out.close();
  std::printf("pairs=%zu scores=%s threshold=%.2f\n", scores.size(), opt.out.c_str(),
              meta.threshold);

  RunManifest manifest;
  manifest.command = "predict";
  manifest.flags = {{"checkpoint", opt.checkpoint}, {"pairs", opt.pairs}, {"out", opt.out}};
  manifest.seed = meta.train_seed;
  manifest.dataset_name = fs::path(opt.pairs).stem().string();
  manifest.timestamp_utc = utc_timestamp();
  hash_inputs_into(manifest, opt.pairs);
  hash_inputs_into(manifest, opt.checkpoint);
  write_manifest(manifest, opt.manifest_path.empty() ? "predict.manifest.json"
                                                     : opt.manifest_path);
  return 0;
}

struct ExplainOptions {
  std::string checkpoint;
  std::string data;
  std::string split = "test";
  std::string pairs_file;
  std::optional<int> pair_index;
  std::string embeddings_override;
};

void render_explanation(std::size_t index, const Explanation& ex, double threshold) {
  std::printf("pair %zu  score=%.4f  decision=%s  threshold=%.2f\n", index, ex.score,
              ex.score >= threshold ? "match" : "non-match", threshold);
  auto render_group = [](const char* name, const std::vector<TokenWeight>& tokens) {
    std::printf("  %-13s:", name);
    if (tokens.empty()) std::printf(" (none)");
    for (const auto& tw : tokens) std::printf(" %s(%.2f)", tw.token.c_str(), tw.weight);
    std::printf("\n");
  };
  for (const auto& attr : ex.attributes) {
    std::printf("attribute: %s\n", attr.attribute.c_str());
    render_group("shared", attr.shared);
    render_group("unique_left", attr.unique_left);
    render_group("unique_right", attr.unique_right);
    std::printf("  |sim|=%.3f |dif|=%.3f\n", attr.sim_norm, attr.dif_norm);
  }
}

int run_explain(const ExplainOptions& opt) {
  auto [model, meta] = load_checkpoint(opt.checkpoint);
  EmbeddingStore store = store_for_checkpoint(meta, opt.embeddings_override);

  Schema schema;
  std::vector<LabeledPair> pairs;
  if (!opt.pairs_file.empty()) {
    std::tie(schema, pairs) = load_pairs_csv(opt.pairs_file);
  } else {
    if (opt.data.empty()) throw std::runtime_error("explain needs --data or --pairs");
    Dataset ds = load_any_dataset(opt.data, meta.split_seed);
    schema = ds.schema;
    pairs = ds.split(opt.split);
  }
  check_schema(meta, schema);

  if (opt.pair_index) {
    int idx = *opt.pair_index;
    if (idx < 0 || std::size_t(idx) >= pairs.size()) {
      throw std::runtime_error("pair index " + std::to_string(idx) + " out of range, split has " +
                               std::to_string(pairs.size()) + " pairs");
    }
    render_explanation(std::size_t(idx), explain_pair(model, pairs[idx], schema, store),
                       meta.threshold);
  } else {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      render_explanation(i, explain_pair(model, pairs[i], schema, store), meta.threshold);
    }
  }
  return 0;
}

struct GradcheckOptions {
  std::string variant = "all";
  std::uint64_t seed = 0;
  bool inject_fault = false;
};

// Toy configuration (m=2, d=8) exercised with a random token pair. Every
// attribute gets non-empty shared and unique groups so the loss is
// differentiable at the evaluation point (an empty group parks a ReLU
// pre-activation exactly on its kink, where finite differences and the
// subgradient legitimately disagree).
int run_gradcheck(const GradcheckOptions& opt) {
  Schema schema({"a1", "a2"});
  EmbeddingStore store = EmbeddingStore::hashed(8, opt.seed);

  std::mt19937_64 g(rng::mix(opt.seed, 0x67726164));
  auto random_values = [&](int max_base) {
    static const char* base[] = {"alpha", "beta", "gamma", "delta", "epsilon",
                                 "zeta",  "eta",  "theta", "iota",  "kappa"};
    static const char* left_only[] = {"l1", "l2", "l3", "l4", "l5"};
    static const char* right_only[] = {"r1", "r2", "r3", "r4", "r5"};
    std::string shared;
    int count = 1 + int(rng::bounded(g, std::uint64_t(max_base)));
    for (int i = 0; i < count; ++i) {
      if (!shared.empty()) shared += " ";
      shared += base[rng::bounded(g, 10)];
    }
    std::string left = shared + " " + left_only[rng::bounded(g, 5)];
    std::string right = shared + " " + right_only[rng::bounded(g, 5)];
    return std::pair<std::string, std::string>(left, right);
  };
  LabeledPair pair;
  auto [l1, r1] = random_values(5);
  auto [l2, r2] = random_values(3);
  pair.left.values = {l1, l2};
  pair.right.values = {r1, r2};
  pair.label = int(rng::bounded(g, 2));

  std::vector<std::string> names;
  if (opt.variant == "all") names = {"sum", "attention", "context-attention", "twin-sum"};
  else names = {opt.variant};

  bool ok = true;
  for (const auto& name : names) {
    ModelConfig config;
    config.variant = variant_from_name(name);
    config.attribute_count = 2;
    config.embedding_dim = 8;
    config.sim_dif_dim = 5;
    config.hidden_dim = 7;
    config.d1_trainable_q = 3;
    config.d1_context = 5;
    config.d2 = 5;
    config.seed = opt.seed;
    Model model = init_model(config);
    auto params = model.params();
    nn::zero_grads(params);

    std::function<double()> loss_fn;
    if (config.variant == Variant::kTwinSum) {
      auto tp = embed_pair_tokens(store, schema, pair);
      TwinForwardCache cache;
      twin_forward_score(model, tp, &cache);
      twin_backward(model, cache, pair.label);
      loss_fn = [&model, tp, &pair]() {
        TwinForwardCache c;
        twin_forward_score(model, tp, &c);
        return nn::cross_entropy(c.logits, pair.label).loss;
      };
    } else {
      auto ep = embed_contrasted_pair(store, contrast_pair(pair, schema));
      ForwardCache cache;
      forward_score(model, ep, &cache);
      backward(model, ep, cache, pair.label);
      loss_fn = [&model, ep, &pair]() {
        ForwardCache c;
        forward_score(model, ep, &c);
        return nn::cross_entropy(c.logits, pair.label).loss;
      };
    }
    if (opt.inject_fault) {
      for (auto& x : params.front().tensor->g) x *= 1.1;
    }
    double err = nn::grad_check(loss_fn, params, 1e-5);
    bool pass = err < 1e-4;
    ok = ok && pass;
    std::printf("variant=%s max_rel_err=%.3g %s\n", name.c_str(), err,
                pass ? "ok" : "FAIL");
  }
  return ok ? 0 : 1;
}

struct VocabOptions {
  std::string data;
  std::string out;
};

int run_vocab_extract(const VocabOptions& opt) {
  Dataset ds = load_any_dataset(opt.data, 0);
  std::set<std::string> vocab;
  auto add_pairs = [&](const std::vector<LabeledPair>& pairs) {
    for (const auto& p : pairs) {
      for (const auto& rec : {p.left, p.right}) {
        for (const auto& value : rec.values) {
          for (auto& t : tokenize(value)) vocab.insert(std::move(t));
        }
      }
    }
  };
  add_pairs(ds.train);
  add_pairs(ds.valid);
  add_pairs(ds.test);

  std::ofstream out(opt.out, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + opt.out);
  for (const auto& t : vocab) out << t << "\n";
  out.close();
  std::printf("tokens=%zu out=%s\n", vocab.size(), opt.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CorDEL: contrastive entity linkage"};
  app.require_subcommand(1);

  TrainOptions train_opt;
  auto* train_cmd = app.add_subcommand("train", "train a matcher and write a checkpoint");
  train_cmd->add_option("--data", train_opt.data, "dataset directory or pairs CSV")->required();
  train_cmd->add_option("--variant", train_opt.variant, "model variant")
      ->check(CLI::IsMember({"sum", "attention", "context-attention", "twin-sum"}))
      ->default_val("sum");
  attach_embedding_flags(train_cmd, train_opt.embeddings);
  train_cmd->add_option("--seed", train_opt.seed)->default_val(0);
  std::uint64_t split_seed_flag = 0;
  auto* split_seed_opt = train_cmd->add_option("--split-seed", split_seed_flag,
                                               "seed for 3:1:1 splitting of flat pair lists");
  train_cmd->add_option("--epochs", train_opt.epochs)->default_val(20);
  train_cmd->add_option("--batch-size", train_opt.batch_size)->default_val(64);
  train_cmd->add_option("--lr", train_opt.learning_rate)->default_val(1e-4);
  train_cmd->add_option("--out", train_opt.out, "checkpoint path")->default_val("model.ckpt");
  train_cmd->add_option("--manifest", train_opt.manifest_path, "manifest path");

  EvalOptions eval_opt;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset split");
  eval_cmd->add_option("--checkpoint", eval_opt.checkpoint)->required();
  eval_cmd->add_option("--data", eval_opt.data)->required();
  eval_cmd->add_option("--split", eval_opt.split)
      ->check(CLI::IsMember({"train", "valid", "test"}))
      ->default_val("test");
  eval_cmd->add_option("--threshold", eval_opt.threshold)->default_val(0.5);
  eval_cmd->add_option("--pr-out", eval_opt.pr_out, "PR-curve CSV path")
      ->default_val("pr_curve.csv");
  eval_cmd->add_option("--embeddings", eval_opt.embeddings_override,
                       "override the recorded embedding file");
  eval_cmd->add_option("--manifest", eval_opt.manifest_path, "manifest path");

  PredictOptions predict_opt;
  auto* predict_cmd = app.add_subcommand("predict", "score a pairs CSV");
  predict_cmd->add_option("--checkpoint", predict_opt.checkpoint)->required();
  predict_cmd->add_option("--pairs", predict_opt.pairs, "pairs CSV")->required();
  predict_cmd->add_option("--out", predict_opt.out)->default_val("scores.csv");
  predict_cmd->add_option("--embeddings", predict_opt.embeddings_override,
                          "override the recorded embedding file");
  predict_cmd->add_option("--manifest", predict_opt.manifest_path, "manifest path");

  ExplainOptions explain_opt;
  int pair_index_flag = -1;
  auto* explain_cmd = app.add_subcommand("explain", "render token groups and weights");
  explain_cmd->add_option("--checkpoint", explain_opt.checkpoint)->required();
  explain_cmd->add_option("--data", explain_opt.data, "dataset directory or pairs CSV");
  explain_cmd->add_option("--split", explain_opt.split)
      ->check(CLI::IsMember({"train", "valid", "test"}))
      ->default_val("test");
  auto* pair_index_opt = explain_cmd->add_option("--pair-index", pair_index_flag,
                                                 "explain a single pair of the split");
  explain_cmd->add_option("--pairs", explain_opt.pairs_file, "explain every pair of this CSV");
  explain_cmd->add_option("--embeddings", explain_opt.embeddings_override,
                          "override the recorded embedding file");

  GradcheckOptions grad_opt;
  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference check of all gradients");
  grad_cmd->add_option("--variant", grad_opt.variant)
      ->check(CLI::IsMember({"all", "sum", "attention", "context-attention", "twin-sum"}))
      ->default_val("all");
  grad_cmd->add_option("--seed", grad_opt.seed)->default_val(0);
  grad_cmd->add_flag("--inject-fault", grad_opt.inject_fault,
                     "corrupt one gradient to prove the harness detects it");

  VocabOptions vocab_opt;
  auto* vocab_cmd = app.add_subcommand("vocab-extract", "write the sorted token set of a dataset");
  vocab_cmd->add_option("--data", vocab_opt.data)->required();
  vocab_cmd->add_option("--out", vocab_opt.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(train_cmd)) {
      if (train_opt.embeddings.file.empty() && !train_opt.embeddings.hashed) {
        std::cerr << "train: pass --embeddings PATH or --hashed-embeddings\n";
        return 2;
      }
      if (*split_seed_opt) train_opt.split_seed = split_seed_flag;
      return run_train(train_opt);
    }
    if (app.got_subcommand(eval_cmd)) return run_eval(eval_opt);
    if (app.got_subcommand(predict_cmd)) return run_predict(predict_opt);
    if (app.got_subcommand(explain_cmd)) {
      if (*pair_index_opt) explain_opt.pair_index = pair_index_flag;
      return run_explain(explain_opt);
    }
    if (app.got_subcommand(grad_cmd)) return run_gradcheck(grad_opt);
    if (app.got_subcommand(vocab_cmd)) return run_vocab_extract(vocab_opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
