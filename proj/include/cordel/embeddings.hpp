#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cordel/lim.hpp"
#include "cordel/rng.hpp"

// Token -> vector lookup. Vectors come from a whitespace-separated text file
// (token followed by `dim` decimals per line, optional "count dim" first
// line), or are synthesized on the fly: the hashed-gaussian policy draws a
// unit-variance vector from a generator keyed by (seed, token), so unknown
// tokens get stable, distinct embeddings. Stores are frozen; nothing here is
// ever trained.

namespace cordel {

using Vec = std::vector<double>;

enum class OovPolicy { kHashedGaussian, kZero };

class EmbeddingStore {
 public:
  EmbeddingStore(int dim, OovPolicy policy, std::uint64_t oov_seed)
      : dim_(dim), policy_(policy), oov_seed_(oov_seed) {
    if (dim <= 0) throw std::invalid_argument("embedding dim must be positive");
  }

  // A store with an empty table: every token goes through the OOV policy.
  static EmbeddingStore hashed(int dim, std::uint64_t seed) {
    return EmbeddingStore(dim, OovPolicy::kHashedGaussian, seed);
  }

  int dim() const { return dim_; }
  OovPolicy oov_policy() const { return policy_; }
  std::uint64_t oov_seed() const { return oov_seed_; }
  std::size_t vocabulary_size() const { return table_.size(); }
  bool contains(const std::string& token) const { return table_.count(token) != 0; }

  void insert(std::string token, Vec vector) {
    if (vector.size() != static_cast<std::size_t>(dim_)) {
      throw std::invalid_argument("vector length does not match store dim");
    }
    table_.emplace(std::move(token), std::move(vector));  // first occurrence wins
  }

  Vec embed(const std::string& token) const {
    auto it = table_.find(token);
    if (it != table_.end()) return it->second;
    if (policy_ == OovPolicy::kZero) return Vec(dim_, 0.0);
    std::mt19937_64 g(rng::mix(oov_seed_, rng::fnv1a64(token)));
    Vec v(dim_);
    for (auto& x : v) x = rng::gaussian(g);
    return v;
  }

 private:
  int dim_;
  OovPolicy policy_;
  std::uint64_t oov_seed_;
  std::unordered_map<std::string, Vec> table_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) parts.push_back(line.substr(start, i - start));
  }
  return parts;
}

inline bool parse_double(std::string_view s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

inline bool parse_uint(std::string_view s, std::uint64_t& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace detail

inline EmbeddingStore load_word_embeddings(const std::filesystem::path& path,
                                           int expected_dim,
                                           OovPolicy policy = OovPolicy::kHashedGaussian,
                                           std::uint64_t oov_seed = 0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embeddings file: " + path.string());

  EmbeddingStore store(expected_dim, policy, oov_seed);
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    auto parts = detail::split_ws(line);
    if (parts.empty()) continue;
    if (first_content_line && parts.size() == 2) {
      // optional "count dim" header
      std::uint64_t count = 0, dim = 0;
      if (detail::parse_uint(parts[0], count) && detail::parse_uint(parts[1], dim)) {
        first_content_line = false;
        if (dim != static_cast<std::uint64_t>(expected_dim)) {
          throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                   ": header declares dim " + std::to_string(dim) +
                                   ", expected " + std::to_string(expected_dim));
        }
        continue;
      }
    }
    first_content_line = false;
    if (parts.size() != static_cast<std::size_t>(expected_dim) + 1) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": got " +
                               std::to_string(parts.size() ? parts.size() - 1 : 0) +
                               " values, expected " + std::to_string(expected_dim));
    }
    Vec v(expected_dim);
    for (int k = 0; k < expected_dim; ++k) {
      if (!detail::parse_double(parts[k + 1], v[k])) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": unparsable number \"" + std::string(parts[k + 1]) + "\"");
      }
    }
    store.insert(std::string(parts[0]), std::move(v));
  }
  if (store.vocabulary_size() == 0) {
    throw std::runtime_error(path.string() + ": no vectors found");
  }
  return store;
}

struct EmbeddedGroupTriple {
  std::vector<Vec> shared;
  std::vector<Vec> unique_left;
  std::vector<Vec> unique_right;
};

struct EmbeddedPair {
  int dim = 0;
  std::vector<EmbeddedGroupTriple> per_attribute;
};

inline EmbeddedPair embed_contrasted_pair(const EmbeddingStore& store,
                                          const ContrastedPair& cp) {
  EmbeddedPair ep;
  ep.dim = store.dim();
  ep.per_attribute.reserve(cp.per_attribute.size());
  auto embed_group = [&](const std::vector<std::string>& tokens) {
    std::vector<Vec> vecs;
    vecs.reserve(tokens.size());
    for (const auto& t : tokens) vecs.push_back(store.embed(t));
    return vecs;
  };
  for (const auto& triple : cp.per_attribute) {
    ep.per_attribute.push_back({embed_group(triple.shared),
                                embed_group(triple.unique_left),
                                embed_group(triple.unique_right)});
  }
  return ep;
}

// Uncontrasted form used by the twin baseline: every token of each record,
// duplicates included.
struct EmbeddedTwinAttribute {
  std::vector<Vec> left;
  std::vector<Vec> right;
};

struct TwinEmbeddedPair {
  int dim = 0;
  std::vector<EmbeddedTwinAttribute> per_attribute;
};

inline TwinEmbeddedPair embed_pair_tokens(const EmbeddingStore& store, const Schema& schema,
                                          const LabeledPair& pair) {
  if (pair.left.values.size() != schema.size() || pair.right.values.size() != schema.size()) {
    throw std::invalid_argument("record width does not match schema");
  }
  TwinEmbeddedPair tp;
  tp.dim = store.dim();
  tp.per_attribute.resize(schema.size());
  auto embed_value = [&](const std::string& value) {
    std::vector<Vec> vecs;
    for (const auto& t : tokenize(value)) vecs.push_back(store.embed(t));
    return vecs;
  };
  for (std::size_t j = 0; j < schema.size(); ++j) {
    tp.per_attribute[j].left = embed_value(pair.left.values[j]);
    tp.per_attribute[j].right = embed_value(pair.right.values[j]);
  }
  return tp;
}

}  // namespace cordel
