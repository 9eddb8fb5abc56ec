#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cordel/lim.hpp"
#include "cordel/rng.hpp"

using namespace cordel;

namespace {

std::set<std::string> as_set(const std::vector<std::string>& tokens) {
  return {tokens.begin(), tokens.end()};
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += " ";
    out += t;
  }
  return out;
}

std::vector<std::string> random_tokens(std::mt19937_64& g, int max_len) {
  static const std::vector<std::string> pool = {"a",  "b",  "c",   "d",   "ab",
                                                "cd", "x1", "y2",  "z-9", "foo",
                                                "bar", "12", "3.5", "oz",  "pack"};
  std::vector<std::string> out;
  std::size_t len = rng::bounded(g, std::uint64_t(max_len + 1));
  for (std::size_t i = 0; i < len; ++i) out.push_back(pool[rng::bounded(g, pool.size())]);
  return out;
}

TEST(Tokenize, StripsBracketsAndLowercases) {
  EXPECT_EQ(tokenize("Ink tank [black]"), (std::vector<std::string>{"ink", "tank", "black"}));
}

TEST(Tokenize, EmptyString) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("  \t ,,, ").empty());
}

TEST(Tokenize, KeepsInternalPunctuation) {
  EXPECT_EQ(tokenize("Coca-Cola 12 fl oz"),
            (std::vector<std::string>{"coca-cola", "12", "fl", "oz"}));
  EXPECT_EQ(tokenize("a--b"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(tokenize("usb-c (2 m)"), (std::vector<std::string>{"usb-c", "2", "m"}));
}

TEST(Tokenize, PreservesDuplicatesInOrder) {
  EXPECT_EQ(tokenize("a b a"), (std::vector<std::string>{"a", "b", "a"}));
}

TEST(Tokenize, IdempotentOnItsOwnOutput) {
  std::vector<std::string> inputs = {
      "Coca-Cola 12 fl oz [8 pack]", "  weird...punct!!x  ", "A-1 b_2 c.3",
      "trailing-", "-leading", "(a) [b] {c}", "MiXeD CaSe TEXT"};
  for (const auto& s : inputs) {
    auto once = tokenize(s);
    auto twice = tokenize(join(once));
    EXPECT_EQ(once, twice) << "input: " << s;
  }
}

TEST(ContrastAttribute, CocaColaPackExample) {
  auto t = contrast_attribute({"coca-cola", "12", "fl", "oz", "8", "pack"},
                              {"coca-cola", "12", "fl", "oz", "6", "pack"});
  EXPECT_EQ(t.shared, (std::vector<std::string>{"coca-cola", "12", "fl", "oz", "pack"}));
  EXPECT_EQ(t.unique_left, (std::vector<std::string>{"8"}));
  EXPECT_EQ(t.unique_right, (std::vector<std::string>{"6"}));
}

TEST(ContrastAttribute, IdenticalListsHaveEmptyUniques) {
  auto t = contrast_attribute({"a", "b", "a"}, {"a", "b", "a"});
  EXPECT_EQ(t.shared, (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(t.unique_left.empty());
  EXPECT_TRUE(t.unique_right.empty());
}

TEST(ContrastAttribute, SetAlgebraWithDuplicates) {
  auto t = contrast_attribute({"a", "a", "b"}, {"b", "c"});
  EXPECT_EQ(t.shared, (std::vector<std::string>{"b"}));
  EXPECT_EQ(t.unique_left, (std::vector<std::string>{"a"}));
  EXPECT_EQ(t.unique_right, (std::vector<std::string>{"c"}));
}

TEST(ContrastAttribute, EmptySides) {
  auto t = contrast_attribute({}, {"x", "y"});
  EXPECT_TRUE(t.shared.empty());
  EXPECT_TRUE(t.unique_left.empty());
  EXPECT_EQ(t.unique_right, (std::vector<std::string>{"x", "y"}));
  auto e = contrast_attribute({}, {});
  EXPECT_TRUE(e.shared.empty() && e.unique_left.empty() && e.unique_right.empty());
}

TEST(ContrastPair, BoundaryAttributes) {
  Schema schema({"title", "brand"});
  LabeledPair pair;
  pair.left.values = {"same words here", "alpha beta"};
  pair.right.values = {"same words here", "gamma delta"};
  auto cp = contrast_pair(pair, schema);
  ASSERT_EQ(cp.per_attribute.size(), 2u);
  EXPECT_TRUE(cp.per_attribute[0].unique_left.empty());
  EXPECT_TRUE(cp.per_attribute[0].unique_right.empty());
  EXPECT_TRUE(cp.per_attribute[1].shared.empty());
}

TEST(ContrastPair, ModelNumberDifferenceLandsInUniqueGroups) {
  Schema schema({"title"});
  LabeledPair pair;
  pair.left.values = {"laptop sleeve case fits 13.3 inch model mb13-bk"};
  pair.right.values = {"laptop sleeve case fits 13.3 inch model mb15-gr"};
  auto cp = contrast_pair(pair, schema);
  const auto& t = cp.per_attribute[0];
  EXPECT_EQ(t.unique_left, (std::vector<std::string>{"mb13-bk"}));
  EXPECT_EQ(t.unique_right, (std::vector<std::string>{"mb15-gr"}));
  EXPECT_EQ(as_set(t.shared),
            as_set(tokenize("laptop sleeve case fits 13.3 inch model")));
}

TEST(ContrastPair, SwapSymmetry) {
  Schema schema({"a", "b"});
  std::mt19937_64 g(7);
  for (int trial = 0; trial < 200; ++trial) {
    LabeledPair pair;
    pair.left.values = {join(random_tokens(g, 8)), join(random_tokens(g, 5))};
    pair.right.values = {join(random_tokens(g, 8)), join(random_tokens(g, 5))};
    LabeledPair swapped{pair.right, pair.left, pair.label};
    auto cp = contrast_pair(pair, schema);
    auto cs = contrast_pair(swapped, schema);
    for (std::size_t j = 0; j < schema.size(); ++j) {
      EXPECT_EQ(as_set(cp.per_attribute[j].shared), as_set(cs.per_attribute[j].shared));
      EXPECT_EQ(cp.per_attribute[j].unique_left, cs.per_attribute[j].unique_right);
      EXPECT_EQ(cp.per_attribute[j].unique_right, cs.per_attribute[j].unique_left);
    }
  }
}

// Partition and disjointness over randomized token lists; the acceptance
// suite repeats this at 10,000 trials.
TEST(ContrastAttribute, PartitionAndDisjointnessProperty) {
  std::mt19937_64 g(42);
  for (int trial = 0; trial < 1000; ++trial) {
    auto left = random_tokens(g, 10);
    auto right = random_tokens(g, 10);
    auto t = contrast_attribute(left, right);

    auto shared = as_set(t.shared);
    auto ul = as_set(t.unique_left);
    auto ur = as_set(t.unique_right);

    // groups are deduplicated
    EXPECT_EQ(shared.size(), t.shared.size());
    EXPECT_EQ(ul.size(), t.unique_left.size());
    EXPECT_EQ(ur.size(), t.unique_right.size());

    // pairwise disjoint
    for (const auto& x : shared) {
      EXPECT_FALSE(ul.count(x));
      EXPECT_FALSE(ur.count(x));
    }
    for (const auto& x : ul) EXPECT_FALSE(ur.count(x));

    // partition: token-set(left) = shared ∪ unique_left, same for right
    std::set<std::string> left_set = as_set(left);
    std::set<std::string> right_set = as_set(right);
    std::set<std::string> left_rebuilt = shared;
    left_rebuilt.insert(ul.begin(), ul.end());
    std::set<std::string> right_rebuilt = shared;
    right_rebuilt.insert(ur.begin(), ur.end());
    EXPECT_EQ(left_rebuilt, left_set);
    EXPECT_EQ(right_rebuilt, right_set);
  }
}

}  // namespace
