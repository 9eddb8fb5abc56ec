#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cordel/csv.hpp"
#include "cordel/rng.hpp"

// Records, labeled pairs and dataset loading. A dataset directory follows the
// public entity-matching benchmark layout: tableA.csv / tableB.csv (first
// column `id`, identical headers) plus train/valid/test.csv with columns
// ltable_id,rtable_id,label. A flat pairs.csv
// (left_<attr>...,right_<attr>...,label) is supported for synthetic data.

namespace cordel {

struct Schema {
  std::vector<std::string> attributes;

  Schema() = default;
  explicit Schema(std::vector<std::string> attrs) : attributes(std::move(attrs)) {
    if (attributes.empty()) {
      throw std::invalid_argument("schema needs at least one attribute");
    }
    std::unordered_set<std::string> seen;
    for (const auto& a : attributes) {
      if (a.empty()) throw std::invalid_argument("schema attribute names must be non-empty");
      if (!seen.insert(a).second) {
        throw std::invalid_argument("duplicate schema attribute: " + a);
      }
    }
  }

  std::size_t size() const { return attributes.size(); }
  bool operator==(const Schema&) const = default;
};

struct Record {
  std::vector<std::string> values;
  bool operator==(const Record&) const = default;
};

struct LabeledPair {
  Record left;
  Record right;
  int label = 0;
  bool operator==(const LabeledPair&) const = default;
};

struct Dataset {
  std::string name;
  Schema schema;
  std::vector<LabeledPair> train;
  std::vector<LabeledPair> valid;
  std::vector<LabeledPair> test;

  const std::vector<LabeledPair>& split(std::string_view which) const {
    if (which == "train") return train;
    if (which == "valid") return valid;
    if (which == "test") return test;
    throw std::invalid_argument("unknown split: " + std::string(which));
  }
};

namespace detail {

inline std::string loc(const std::filesystem::path& file, std::size_t line) {
  return file.string() + ":" + std::to_string(line);
}

inline int parse_label(const std::string& text, const std::filesystem::path& file,
                       std::size_t line) {
  if (text == "0") return 0;
  if (text == "1") return 1;
  throw std::runtime_error(loc(file, line) + ": label must be 0 or 1, got \"" + text + "\"");
}

// Rows may be shorter than the header (absent cells become empty strings) but
// never longer.
inline void normalize_width(std::vector<std::string>& fields, std::size_t width,
                            const std::filesystem::path& file, std::size_t line) {
  if (fields.size() > width) {
    throw std::runtime_error(loc(file, line) + ": row has " +
                             std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(width));
  }
  fields.resize(width);
}

struct IdTable {
  std::vector<std::string> header;  // without the leading id column
  std::unordered_map<std::string, Record> rows;
};

inline IdTable read_id_table(const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) {
    throw std::runtime_error("missing file: " + file.string());
  }
  auto rows = csv::read_file(file);
  if (rows.empty()) {
    throw std::runtime_error(file.string() + ": empty file, expected a header row");
  }
  const auto& header = rows.front().fields;
  if (header.empty() || header.front() != "id") {
    throw std::runtime_error(loc(file, rows.front().line) +
                             ": first header column must be \"id\"");
  }
  if (header.size() < 2) {
    throw std::runtime_error(loc(file, rows.front().line) +
                             ": table needs at least one attribute column");
  }
  IdTable table;
  table.header.assign(header.begin() + 1, header.end());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto fields = rows[i].fields;
    normalize_width(fields, header.size(), file, rows[i].line);
    std::string id = fields.front();
    Record rec;
    rec.values.assign(fields.begin() + 1, fields.end());
    if (!table.rows.emplace(std::move(id), std::move(rec)).second) {
      throw std::runtime_error(loc(file, rows[i].line) + ": duplicate id \"" +
                               fields.front() + "\"");
    }
  }
  return table;
}

inline std::vector<LabeledPair> read_split(const std::filesystem::path& file,
                                           const IdTable& left, const IdTable& right) {
  if (!std::filesystem::exists(file)) {
    throw std::runtime_error("missing file: " + file.string());
  }
  auto rows = csv::read_file(file);
  if (rows.empty()) {
    throw std::runtime_error(file.string() + ": empty file, expected a header row");
  }
  const std::vector<std::string> expect = {"ltable_id", "rtable_id", "label"};
  if (rows.front().fields != expect) {
    throw std::runtime_error(loc(file, rows.front().line) +
                             ": header must be ltable_id,rtable_id,label");
  }
  std::vector<LabeledPair> pairs;
  pairs.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto fields = rows[i].fields;
    normalize_width(fields, 3, file, rows[i].line);
    auto lit = left.rows.find(fields[0]);
    if (lit == left.rows.end()) {
      throw std::runtime_error(loc(file, rows[i].line) + ": ltable_id \"" + fields[0] +
                               "\" not found in tableA.csv");
    }
    auto rit = right.rows.find(fields[1]);
    if (rit == right.rows.end()) {
      throw std::runtime_error(loc(file, rows[i].line) + ": rtable_id \"" + fields[1] +
                               "\" not found in tableB.csv");
    }
    pairs.push_back({lit->second, rit->second, parse_label(fields[2], file, rows[i].line)});
  }
  return pairs;
}

}  // namespace detail

inline Dataset load_benchmark_dataset(const std::filesystem::path& dir) {
  auto table_a = detail::read_id_table(dir / "tableA.csv");
  auto table_b = detail::read_id_table(dir / "tableB.csv");
  if (table_a.header != table_b.header) {
    throw std::runtime_error("header mismatch between " + (dir / "tableA.csv").string() +
                             " and " + (dir / "tableB.csv").string());
  }
  Dataset ds;
  ds.name = dir.filename().string();
  ds.schema = Schema(table_a.header);
  ds.train = detail::read_split(dir / "train.csv", table_a, table_b);
  ds.valid = detail::read_split(dir / "valid.csv", table_a, table_b);
  ds.test = detail::read_split(dir / "test.csv", table_a, table_b);
  return ds;
}

// Flat layout: left_<attr>,...,right_<attr>,...,label with matching attribute
// sequences under the two prefixes.
inline std::pair<Schema, std::vector<LabeledPair>> load_pairs_csv(
    const std::filesystem::path& file) {
  if (!std::filesystem::exists(file)) {
    throw std::runtime_error("missing file: " + file.string());
  }
  auto rows = csv::read_file(file);
  if (rows.empty()) {
    throw std::runtime_error(file.string() + ": empty file, expected a header row");
  }
  const auto& header = rows.front().fields;
  if (header.size() < 3 || header.size() % 2 == 0 || header.back() != "label") {
    throw std::runtime_error(detail::loc(file, rows.front().line) +
                             ": header must be left_<attr>...,right_<attr>...,label");
  }
  std::size_t m = (header.size() - 1) / 2;
  std::vector<std::string> attrs;
  for (std::size_t j = 0; j < m; ++j) {
    const std::string& l = header[j];
    const std::string& r = header[m + j];
    if (l.rfind("left_", 0) != 0 || r.rfind("right_", 0) != 0 ||
        l.substr(5) != r.substr(6)) {
      throw std::runtime_error(detail::loc(file, rows.front().line) +
                               ": column " + std::to_string(j + 1) + " (" + l + ") and column " +
                               std::to_string(m + j + 1) + " (" + r +
                               ") must be left_/right_ forms of the same attribute");
    }
    attrs.push_back(l.substr(5));
  }
  Schema schema(std::move(attrs));
  std::vector<LabeledPair> pairs;
  pairs.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto fields = rows[i].fields;
    detail::normalize_width(fields, header.size(), file, rows[i].line);
    LabeledPair p;
    p.left.values.assign(fields.begin(), fields.begin() + m);
    p.right.values.assign(fields.begin() + m, fields.begin() + 2 * m);
    p.label = detail::parse_label(fields[2 * m], file, rows[i].line);
    pairs.push_back(std::move(p));
  }
  return {std::move(schema), std::move(pairs)};
}

inline void write_pairs_csv(const std::filesystem::path& file, const Schema& schema,
                            const std::vector<LabeledPair>& pairs) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  std::vector<std::string> header;
  for (const auto& a : schema.attributes) header.push_back("left_" + a);
  for (const auto& a : schema.attributes) header.push_back("right_" + a);
  header.push_back("label");
  csv::write_row(out, header);
  for (const auto& p : pairs) {
    std::vector<std::string> row;
    row.insert(row.end(), p.left.values.begin(), p.left.values.end());
    row.insert(row.end(), p.right.values.begin(), p.right.values.end());
    row.push_back(p.label ? "1" : "0");
    csv::write_row(out, row);
  }
}

struct SplitPairs {
  std::vector<LabeledPair> train;
  std::vector<LabeledPair> valid;
  std::vector<LabeledPair> test;
};

// Deterministic shuffle under `seed`, then floor allocation per ratio with the
// remainder assigned to train.
inline SplitPairs split_pairs(const std::vector<LabeledPair>& pairs,
                              std::array<double, 3> ratios, std::uint64_t seed) {
  for (double r : ratios) {
    if (!(r > 0)) throw std::invalid_argument("split ratios must be positive");
  }
  SplitPairs out;
  const std::size_t n = pairs.size();
  if (n == 0) return out;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 g(seed);
  rng::shuffle(idx, g);

  double total = ratios[0] + ratios[1] + ratios[2];
  auto alloc = [&](double r) {
    double q = double(n) * r / total;
    double nearest = std::round(q);
    // snap to the exact integer when q only misses it by float noise
    if (std::abs(q - nearest) < 1e-9 * std::max(1.0, std::abs(q))) return std::size_t(nearest);
    return std::size_t(std::floor(q));
  };
  std::size_t n_train = alloc(ratios[0]);
  std::size_t n_valid = alloc(ratios[1]);
  std::size_t n_test = alloc(ratios[2]);
  while (n_train + n_valid + n_test > n) {
    if (n_test > 0) --n_test;
    else if (n_valid > 0) --n_valid;
    else --n_train;
  }
  n_train += n - (n_train + n_valid + n_test);  // remainder to train

  auto take = [&](std::size_t from, std::size_t count) {
    std::vector<LabeledPair> part;
    part.reserve(count);
    for (std::size_t i = 0; i < count; ++i) part.push_back(pairs[idx[from + i]]);
    return part;
  };
  out.train = take(0, n_train);
  out.valid = take(n_train, n_valid);
  out.test = take(n_train + n_valid, n_test);
  return out;
}

}  // namespace cordel
