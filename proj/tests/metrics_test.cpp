#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cordel/metrics.hpp"
#include "cordel/rng.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace cordel;

namespace {

// Random instance with deliberate ties: scores drawn from a small grid.
void random_instance(std::mt19937_64& g, std::size_t n, std::vector<double>& scores,
                     std::vector<int>& labels) {
  scores.clear();
  labels.clear();
  for (std::size_t i = 0; i < n; ++i) {
    scores.push_back(double(rng::bounded(g, 9)) / 8.0);
    labels.push_back(int(rng::bounded(g, 2)));
  }
  if (std::count(labels.begin(), labels.end(), 1) == 0) {
    labels[rng::bounded(g, n)] = 1;
  }
}

TEST(F1AtThreshold, HandWorkedExample) {
  auto r = f1_at_threshold({0.9, 0.2, 0.7}, {1, 0, 0}, 0.5);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_NEAR(r.f1, 200.0 / 3.0, 1e-12);
  EXPECT_NEAR(std::round(r.f1 * 10.0) / 10.0, 66.7, 1e-12);
  EXPECT_EQ(r.tp, 1);
  EXPECT_EQ(r.fp, 1);
  EXPECT_EQ(r.fn, 0);
  EXPECT_EQ(r.tn, 1);
}

TEST(F1AtThreshold, PerfectClassifier) {
  auto r = f1_at_threshold({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0}, 0.5);
  EXPECT_DOUBLE_EQ(r.f1, 100.0);
}

TEST(F1AtThreshold, NoPositivePredictionsConvention) {
  auto r = f1_at_threshold({0.1, 0.2, 0.3}, {1, 1, 0}, 0.5);
  EXPECT_DOUBLE_EQ(r.precision, 0.0);
  EXPECT_DOUBLE_EQ(r.f1, 0.0);
}

TEST(F1AtThreshold, LengthMismatchThrows) {
  EXPECT_THROW(f1_at_threshold({0.5}, {1, 0}), std::invalid_argument);
}

TEST(F1AtThreshold, JointPermutationInvariance) {
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    random_instance(g, 1 + rng::bounded(g, 20), scores, labels);
    double base = f1_at_threshold(scores, labels, 0.5).f1;

    std::vector<std::size_t> perm(scores.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng::shuffle(perm, g);
    std::vector<double> ps(scores.size());
    std::vector<int> pl(scores.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      ps[i] = scores[perm[i]];
      pl[i] = labels[perm[i]];
    }
    EXPECT_DOUBLE_EQ(f1_at_threshold(ps, pl, 0.5).f1, base);
  }
}

TEST(PRCurve, PerfectSeparationGivesUnitArea) {
  PRCurve curve = pr_curve({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0});
  EXPECT_DOUBLE_EQ(prauc(curve), 1.0);
  EXPECT_DOUBLE_EQ(recall_at_precision(curve, 0.95), 1.0);
}

TEST(PRCurve, HandWorkedAveragePrecision) {
  // AP = (1/2)*1 + (1/2)*(2/3)
  PRCurve curve = pr_curve({0.8, 0.6, 0.4}, {1, 0, 1});
  EXPECT_NEAR(prauc(curve), 0.5 + 0.5 * (2.0 / 3.0), 1e-15);
}

TEST(PRCurve, RequiresAPositiveLabel) {
  EXPECT_THROW(pr_curve({0.4, 0.6}, {0, 0}), std::invalid_argument);
}

TEST(PRCurve, ThresholdsDecreaseAndRecallGrowsAlongStoredOrder) {
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    random_instance(g, 1 + rng::bounded(g, 30), scores, labels);
    PRCurve curve = pr_curve(scores, labels);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      EXPECT_LT(curve.points[i].threshold, curve.points[i - 1].threshold);
      EXPECT_GE(curve.points[i].recall, curve.points[i - 1].recall);
    }
  }
}

TEST(PRCurve, RaisingThresholdNeverIncreasesRecall) {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    random_instance(g, 2 + rng::bounded(g, 30), scores, labels);
    double t1 = rng::uniform(g, 0.0, 1.0);
    double t2 = rng::uniform(g, t1, 1.0);
    EXPECT_LE(f1_at_threshold(scores, labels, t2).recall,
              f1_at_threshold(scores, labels, t1).recall);
  }
}

TEST(PRCurve, MatchesBruteForceOracleExactly) {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    random_instance(g, 1 + rng::bounded(g, 12), scores, labels);
    EXPECT_EQ(prauc(pr_curve(scores, labels)),
              oracle::average_precision_reference(scores, labels));
  }
}

TEST(RecallAtPrecision, UnreachableTargetGivesZero) {
  // best available precision is 2/3 < 0.9
  PRCurve curve = pr_curve({0.9, 0.8, 0.7}, {0, 1, 1});
  EXPECT_DOUBLE_EQ(recall_at_precision(curve, 0.9), 0.0);
}

TEST(RecallAtPrecision, HandCurveMaxRecallPoint) {
  PRCurve curve;
  curve.positives = 4;
  curve.points = {{0.9, 1.0, 0.25}, {0.7, 0.96, 0.5}, {0.5, 0.80, 0.75}};
  EXPECT_DOUBLE_EQ(recall_at_precision(curve, 0.95), 0.5);
  EXPECT_DOUBLE_EQ(recall_at_precision(curve, 0.99), 0.25);
}

TEST(Calibrate, MatchesExhaustiveSweep) {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    random_instance(g, 1 + rng::bounded(g, 12), scores, labels);
    auto got = calibrate_threshold(scores, labels);
    auto ref = oracle::calibrate_reference(scores, labels);
    EXPECT_EQ(got.threshold, ref.threshold);
    EXPECT_EQ(got.f1, ref.f1);
  }
}

TEST(Calibrate, SeparatedDataPicksLowestTiedThreshold) {
  auto cal = calibrate_threshold({0.9, 0.8, 0.1, 0.05}, {1, 1, 0, 0});
  EXPECT_DOUBLE_EQ(cal.f1, 100.0);
  EXPECT_DOUBLE_EQ(cal.threshold, 0.8);  // lowest candidate achieving the max
}

TEST(Calibrate, AllEqualScoresSingleCandidate) {
  auto cal = calibrate_threshold({0.4, 0.4, 0.4}, {1, 0, 1});
  EXPECT_DOUBLE_EQ(cal.threshold, 0.4);
}

TEST(Calibrate, EmptyInputThrows) {
  EXPECT_THROW(calibrate_threshold({}, {}), std::invalid_argument);
}

TEST(PrCsv, TwoColumnFormat) {
  testutil::TempDir dir;
  PRCurve curve = pr_curve({0.8, 0.6, 0.4}, {1, 0, 1});
  write_pr_csv(curve, dir.file("pr.csv"));
  std::string text = testutil::read_file(dir.file("pr.csv"));
  EXPECT_EQ(text.substr(0, 17), "recall,precision\n");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + long(curve.points.size()));
}

}  // namespace
