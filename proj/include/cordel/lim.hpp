#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cordel/data_model.hpp"

// Tokenization and the local interaction step: two attribute values are
// contrasted into shared and unique token groups with set semantics.

namespace cordel {

namespace detail {

// Locale-independent byte classes. Bytes >= 0x80 (UTF-8 multibyte parts) are
// treated as word characters and passed through unchanged.
constexpr bool word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

constexpr bool space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

constexpr char lower_byte(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? char(c + 32) : char(c);
}

}  // namespace detail

// Lowercases and splits on whitespace/punctuation. A punctuation character
// survives only when it sits between two word characters ("coca-cola" stays
// one token, "[black]" becomes "black"). Duplicates are preserved in order.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (detail::word_byte(c)) {
      current.push_back(detail::lower_byte(c));
      continue;
    }
    bool internal = !detail::space_byte(c) && !current.empty() && i + 1 < n &&
                    detail::word_byte(static_cast<unsigned char>(text[i + 1]));
    if (internal) {
      current.push_back(static_cast<char>(c));
      continue;
    }
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

struct TokenGroupTriple {
  std::vector<std::string> shared;
  std::vector<std::string> unique_left;
  std::vector<std::string> unique_right;
};

// Set semantics: shared = left ∩ right, unique sides are the set differences.
// Each group is deduplicated and ordered by first occurrence.
inline TokenGroupTriple contrast_attribute(const std::vector<std::string>& left,
                                           const std::vector<std::string>& right) {
  std::unordered_set<std::string_view> left_set(left.begin(), left.end());
  std::unordered_set<std::string_view> right_set(right.begin(), right.end());

  TokenGroupTriple out;
  std::unordered_set<std::string_view> emitted;
  for (const auto& t : left) {
    if (!emitted.insert(t).second) continue;
    if (right_set.count(t)) out.shared.push_back(t);
    else out.unique_left.push_back(t);
  }
  emitted.clear();
  for (const auto& t : right) {
    if (left_set.count(t)) continue;  // shared, already emitted from the left pass
    if (emitted.insert(t).second) out.unique_right.push_back(t);
  }
  return out;
}

struct ContrastedPair {
  std::vector<TokenGroupTriple> per_attribute;
};

inline ContrastedPair contrast_pair(const LabeledPair& pair, const Schema& schema) {
  if (pair.left.values.size() != schema.size() || pair.right.values.size() != schema.size()) {
    throw std::invalid_argument("record width does not match schema");
  }
  ContrastedPair cp;
  cp.per_attribute.reserve(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    cp.per_attribute.push_back(
        contrast_attribute(tokenize(pair.left.values[j]), tokenize(pair.right.values[j])));
  }
  return cp;
}

}  // namespace cordel
