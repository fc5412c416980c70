#include "sknaflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sknaflow/error.hpp"

namespace sknaflow {

namespace {

constexpr const char* kModule = "metrics";

void check_scores(const LabeledScores& scores, const char* op) {
  if (scores.negatives.empty() || scores.positives.empty()) {
    throw Error(ErrorKind::degenerate, kModule, op, "both classes need at least one score");
  }
  for (const auto* list : {&scores.negatives, &scores.positives}) {
    for (double v : *list) {
      if (!std::isfinite(v)) throw Error(ErrorKind::data, kModule, op, "non-finite score");
    }
  }
}

}  // namespace

RocCurve roc(const LabeledScores& scores) {
  check_scores(scores, "roc");
  std::vector<double> pooled(scores.negatives);
  pooled.insert(pooled.end(), scores.positives.begin(), scores.positives.end());
  std::sort(pooled.begin(), pooled.end(), std::greater<>());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  RocCurve curve;
  constexpr double inf = std::numeric_limits<double>::infinity();
  curve.thresholds.push_back(inf);
  for (std::size_t i = 0; i + 1 < pooled.size(); ++i) curve.thresholds.push_back(0.5 * (pooled[i] + pooled[i + 1]));
  curve.thresholds.push_back(-inf);

  std::vector<double> neg(scores.negatives), pos(scores.positives);
  std::sort(neg.begin(), neg.end());
  std::sort(pos.begin(), pos.end());
  const auto count_at_or_above = [](const std::vector<double>& sorted, double thr) {
    return static_cast<std::size_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), thr));
  };
  curve.n_positive = pos.size();
  curve.n_negative = neg.size();
  for (double thr : curve.thresholds) {
    curve.tp.push_back(count_at_or_above(pos, thr));
    curve.fp.push_back(count_at_or_above(neg, thr));
    curve.tpr.push_back(static_cast<double>(curve.tp.back()) / static_cast<double>(pos.size()));
    curve.fpr.push_back(static_cast<double>(curve.fp.back()) / static_cast<double>(neg.size()));
  }
  return curve;
}

double auc(const RocCurve& curve) {
  if (curve.tp.size() == curve.fpr.size() && curve.n_positive > 0 && curve.n_negative > 0) {
    // Twice the trapezoid area in count units is an integer.
    unsigned long long twice = 0;
    for (std::size_t i = 1; i < curve.fp.size(); ++i) {
      twice += static_cast<unsigned long long>(curve.fp[i] - curve.fp[i - 1]) * (curve.tp[i] + curve.tp[i - 1]);
    }
    return static_cast<double>(twice) /
           (2.0 * static_cast<double>(curve.n_positive) * static_cast<double>(curve.n_negative));
  }
  double area = 0.0;
  for (std::size_t i = 1; i < curve.fpr.size(); ++i) {
    area += (curve.fpr[i] - curve.fpr[i - 1]) * 0.5 * (curve.tpr[i] + curve.tpr[i - 1]);
  }
  return area;
}

YoudenResult youden_optimal(const LabeledScores& scores) {
  const RocCurve curve = roc(scores);
  YoudenResult best{-std::numeric_limits<double>::infinity(), 0.0, 0.0};
  double best_tpr = 0.0, best_fpr = 0.0;
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    const double j = curve.tpr[i] - curve.fpr[i];
    if (j >= best.j) {
      best.j = j;
      best.threshold = curve.thresholds[i];
      best_tpr = curve.tpr[i];
      best_fpr = curve.fpr[i];
    }
  }
  best.bacc = 0.5 * (best_tpr + (1.0 - best_fpr));
  return best;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::insufficient_data, kModule, "mean", "empty value list");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double population_sd(std::span<const double> values) {
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

double coefficient_of_variation(std::span<const double> values) {
  const double m = mean_of(values);
  if (m == 0.0) throw Error(ErrorKind::degenerate, kModule, "coefficient_of_variation", "mean is zero");
  return population_sd(values) / m;
}

std::string_view to_string(IccForm form) {
  return form == IccForm::two_way_random_single ? "two_way_random_single" : "two_way_mixed_single";
}

std::string_view to_string(Reliability label) {
  switch (label) {
    case Reliability::poor: return "poor";
    case Reliability::moderate: return "moderate";
    case Reliability::good: return "good";
    case Reliability::excellent: return "excellent";
  }
  return "?";
}

IccForm parse_icc_form(std::string_view text) {
  if (text == "two_way_random_single") return IccForm::two_way_random_single;
  if (text == "two_way_mixed_single") return IccForm::two_way_mixed_single;
  throw Error(ErrorKind::config, kModule, "icc", "unknown ICC form '" + std::string(text) + "'");
}

Reliability classify_reliability(double value) {
  if (value >= 0.9) return Reliability::excellent;
  if (value >= 0.75) return Reliability::good;
  if (value >= 0.5) return Reliability::moderate;
  return Reliability::poor;
}

IccResult icc(const ReliabilityMatrix& matrix, IccForm form) {
  const std::string op = "icc";
  if (matrix.values.size() != matrix.rows * matrix.cols) {
    throw Error(ErrorKind::validation, kModule, op, "matrix size does not match its shape");
  }
  std::vector<std::size_t> complete;
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    bool ok = true;
    for (std::size_t c = 0; c < matrix.cols; ++c) ok = ok && std::isfinite(matrix.at(r, c));
    if (ok) complete.push_back(r);
  }
  const std::size_t n = complete.size();
  const std::size_t k = matrix.cols;
  if (n < 2 || k < 2) {
    throw Error(ErrorKind::insufficient_data, kModule, op,
                "need at least 2 complete rows and 2 columns, have " + std::to_string(n) + " x " + std::to_string(k));
  }

  double grand = 0.0;
  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      const double v = matrix.at(complete[i], c);
      row_mean[i] += v;
      col_mean[c] += v;
      grand += v;
    }
  }
  for (auto& v : row_mean) v /= static_cast<double>(k);
  for (auto& v : col_mean) v /= static_cast<double>(n);
  grand /= static_cast<double>(n * k);

  double ss_rows = 0.0, ss_cols = 0.0, ss_total = 0.0;
  for (double v : row_mean) ss_rows += (v - grand) * (v - grand);
  for (double v : col_mean) ss_cols += (v - grand) * (v - grand);
  ss_rows *= static_cast<double>(k);
  ss_cols *= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      const double d = matrix.at(complete[i], c) - grand;
      ss_total += d * d;
    }
  }
  const double ss_error = std::max(0.0, ss_total - ss_rows - ss_cols);

  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  const double ms_rows = ss_rows / (nn - 1.0);
  const double ms_cols = ss_cols / (kk - 1.0);
  const double ms_error = ss_error / ((nn - 1.0) * (kk - 1.0));

  const double denom = form == IccForm::two_way_random_single
                           ? ms_rows + (kk - 1.0) * ms_error + (kk / nn) * (ms_cols - ms_error)
                           : ms_rows + (kk - 1.0) * ms_error;
  if (!(std::abs(denom) > 0.0)) {
    throw Error(ErrorKind::degenerate, kModule, op, "zero between-subject and error variance");
  }
  const double value = (ms_rows - ms_error) / denom;
  return {value, classify_reliability(value)};
}

}  // namespace sknaflow
