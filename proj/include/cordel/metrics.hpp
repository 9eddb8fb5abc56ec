#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <vector>

// Threshold metrics and precision-recall analysis. Conventions:
//   - a pair is predicted positive when score >= threshold
//   - precision/recall/prauc/recall-at-precision are fractions in [0,1]
//   - f1 is kept in percent, the way results tables quote it
//   - undefined precision or recall (empty denominator) counts as 0
//   - prauc is average precision with step interpolation over the swept
//     thresholds, ties grouped

namespace cordel {

struct MetricsReport {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0;           // fraction
  double recall = 0;              // fraction
  double f1 = 0;                  // percent
  double prauc = -1;              // fraction; -1 when not computed
  double recall_at_p95 = -1;      // fraction; -1 when not computed
  double runtime_seconds = 0;
};

namespace detail {

inline void check_lengths(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("scores and labels must have equal length");
  }
}

inline double f1_percent(double precision, double recall) {
  double pr = precision + recall;
  return pr > 0 ? 200.0 * precision * recall / pr : 0.0;
}

}  // namespace detail

inline MetricsReport f1_at_threshold(const std::vector<double>& scores,
                                     const std::vector<int>& labels,
                                     double threshold = 0.5) {
  detail::check_lengths(scores, labels);
  MetricsReport r;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool predicted = scores[i] >= threshold;
    bool actual = labels[i] == 1;
    if (predicted && actual) ++r.tp;
    else if (predicted && !actual) ++r.fp;
    else if (!predicted && actual) ++r.fn;
    else ++r.tn;
  }
  r.precision = (r.tp + r.fp) > 0 ? double(r.tp) / double(r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn) > 0 ? double(r.tp) / double(r.tp + r.fn) : 0.0;
  r.f1 = detail::f1_percent(r.precision, r.recall);
  return r;
}

struct PRPoint {
  double threshold = 0;
  double precision = 0;
  double recall = 0;
};

// Points are stored along strictly decreasing thresholds (recall
// non-decreasing); equal scores collapse into one point.
struct PRCurve {
  std::vector<PRPoint> points;
  long positives = 0;
};

inline PRCurve pr_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  detail::check_lengths(scores, labels);
  long positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0) {
    throw std::invalid_argument("pr_curve needs at least one positive label");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  PRCurve curve;
  curve.positives = positives;
  long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      if (labels[order[i]] == 1) ++tp;
      else ++fp;
      ++i;
    }
    curve.points.push_back({threshold, double(tp) / double(tp + fp),
                            double(tp) / double(positives)});
  }
  return curve;
}

// Average precision: sum of precision weighted by recall increments.
inline double prauc(const PRCurve& curve) {
  double ap = 0;
  double prev_recall = 0;
  for (const auto& p : curve.points) {
    ap += (p.recall - prev_recall) * p.precision;
    prev_recall = p.recall;
  }
  return ap;
}

// Maximum recall among swept points whose precision reaches the target.
inline double recall_at_precision(const PRCurve& curve, double target = 0.95) {
  double best = 0;
  for (const auto& p : curve.points) {
    if (p.precision >= target) best = std::max(best, p.recall);
  }
  return best;
}

struct Calibration {
  double threshold = 0;
  double f1 = 0;  // percent
};

// Sweeps the distinct scores as candidate thresholds and returns the
// F1-maximizing one; ties resolve to the lowest threshold.
inline Calibration calibrate_threshold(const std::vector<double>& scores,
                                       const std::vector<int>& labels) {
  detail::check_lengths(scores, labels);
  if (scores.empty()) throw std::invalid_argument("calibrate_threshold: empty input");
  std::vector<double> candidates = scores;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  Calibration best{candidates.front(), -1};
  for (double t : candidates) {
    double f1 = f1_at_threshold(scores, labels, t).f1;
    if (f1 > best.f1) best = {t, f1};
  }
  return best;
}

// Two-column CSV (recall, precision) for external plotting.
inline void write_pr_csv(const PRCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "recall,precision\n";
  char buf[64];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.recall, p.precision);
    out << buf;
  }
}

}  // namespace cordel
