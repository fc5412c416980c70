#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sknaflow {

// Baseline segments are the negative class, task segments the positive one.
struct LabeledScores {
  std::vector<double> negatives;
  std::vector<double> positives;
};

// Thresholds run from +inf down to -inf through the midpoints between
// adjacent distinct pooled scores; a score is called positive when it is
// >= the threshold, so the curve starts at (0, 0) and ends at (1, 1).
struct RocCurve {
  std::vector<double> thresholds;
  std::vector<double> tpr;
  std::vector<double> fpr;
  // Counts behind the rates; when present auc() works on them exactly.
  std::vector<std::size_t> tp;
  std::vector<std::size_t> fp;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
};

RocCurve roc(const LabeledScores& scores);

// Trapezoidal area; equals P(pos > neg) + P(pos == neg) / 2.
double auc(const RocCurve& curve);

struct YoudenResult {
  double j = 0.0;
  double bacc = 0.0;
  double threshold = 0.0;
};

// Maximises tpr - fpr over the ROC thresholds (ties go to the smallest
// threshold) and reports balanced accuracy at that same threshold.
YoudenResult youden_optimal(const LabeledScores& scores);

// Population standard deviation over the mean.
double coefficient_of_variation(std::span<const double> values);

// Population mean and standard deviation.
double mean_of(std::span<const double> values);
double population_sd(std::span<const double> values);

enum class IccForm { two_way_random_single, two_way_mixed_single };
enum class Reliability { poor, moderate, good, excellent };

std::string_view to_string(IccForm form);
std::string_view to_string(Reliability label);
IccForm parse_icc_form(std::string_view text);

// Subjects x measurements grid, row-major; NaN marks a missing cell.
struct ReliabilityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct IccResult {
  double icc = 0.0;
  Reliability label = Reliability::poor;
};

// < 0.5 poor, [0.5, 0.75) moderate, [0.75, 0.9) good, >= 0.9 excellent.
Reliability classify_reliability(double icc);

// Two-way ANOVA ICC on the listwise-complete rows.
IccResult icc(const ReliabilityMatrix& matrix, IccForm form = IccForm::two_way_random_single);

}  // namespace sknaflow
