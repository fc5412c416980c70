#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "sknaflow/error.hpp"
#include "sknaflow/metrics.hpp"

using Catch::Approx;
using namespace sknaflow;

namespace {

// P(pos > neg) + P(pos == neg) / 2 by exhaustive pair counting, in halves.
double pair_count_auc(const LabeledScores& s) {
  long long halves = 0;
  for (double p : s.positives) {
    for (double n : s.negatives) halves += p > n ? 2 : (p == n ? 1 : 0);
  }
  return static_cast<double>(halves) / (2.0 * static_cast<double>(s.positives.size() * s.negatives.size()));
}

ReliabilityMatrix matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return {rows, cols, std::move(values)};
}

}  // namespace

TEST_CASE("auc matches exhaustive pair counting on small integer score sets", "[metrics][auc]") {
  std::mt19937_64 rng(11);
  for (std::size_t nn = 1; nn <= 8; ++nn) {
    for (std::size_t np = 1; np <= 8; ++np) {
      for (int rep = 0; rep < 20; ++rep) {
        std::uniform_int_distribution<int> d(0, 5);
        LabeledScores s;
        for (std::size_t i = 0; i < nn; ++i) s.negatives.push_back(d(rng));
        for (std::size_t i = 0; i < np; ++i) s.positives.push_back(d(rng));
        REQUIRE(auc(roc(s)) == pair_count_auc(s));
      }
    }
  }
}

TEST_CASE("roc runs from (0,0) to (1,1) with descending thresholds", "[metrics][roc]") {
  const LabeledScores s{{1.0, 3.0, 3.0}, {2.0, 3.0, 5.0}};
  const auto c = roc(s);
  REQUIRE(c.thresholds.front() == std::numeric_limits<double>::infinity());
  REQUIRE(c.thresholds.back() == -std::numeric_limits<double>::infinity());
  REQUIRE(c.tpr.front() == 0.0);
  REQUIRE(c.fpr.front() == 0.0);
  REQUIRE(c.tpr.back() == 1.0);
  REQUIRE(c.fpr.back() == 1.0);
  for (std::size_t i = 1; i < c.thresholds.size(); ++i) {
    REQUIRE(c.thresholds[i] < c.thresholds[i - 1]);
    REQUIRE(c.tpr[i] >= c.tpr[i - 1]);
    REQUIRE(c.fpr[i] >= c.fpr[i - 1]);
  }
  // Thresholds between distinct scores 1, 2, 3, 5.
  REQUIRE(c.thresholds.size() == 5);
  REQUIRE(c.thresholds[1] == 4.0);
  REQUIRE(c.thresholds[2] == 2.5);
  REQUIRE(c.thresholds[3] == 1.5);
}

TEST_CASE("youden_optimal on hand-enumerated cases", "[metrics][youden]") {
  SECTION("interleaved scores") {
    // Thresholds 3.5 and 1.5 both reach J = 0.5; the smaller one is kept.
    const auto y = youden_optimal({{1.0, 3.0}, {2.0, 4.0}});
    REQUIRE(y.j == 0.5);
    REQUIRE(y.bacc == 0.75);
    REQUIRE(y.threshold == 1.5);
    REQUIRE(auc(roc({{1.0, 3.0}, {2.0, 4.0}})) == 0.75);
  }
  SECTION("perfect separation") {
    const auto y = youden_optimal({{1.0, 2.0}, {3.0, 4.0}});
    REQUIRE(y.j == 1.0);
    REQUIRE(y.bacc == 1.0);
    REQUIRE(y.threshold == 2.5);
  }
  SECTION("reversed classes give J = 0 at the extreme threshold") {
    const auto y = youden_optimal({{3.0, 4.0}, {1.0, 2.0}});
    REQUIRE(y.j == 0.0);
    REQUIRE(y.bacc == 0.5);
    REQUIRE(y.threshold == -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("balanced accuracy equals (J + 1) / 2 on random score sets", "[metrics][youden]") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 30);
  for (int rep = 0; rep < 1000; ++rep) {
    LabeledScores s;
    const int nn = size(rng), np = size(rng);
    const double shift = 0.05 * (rep % 40);
    for (int i = 0; i < nn; ++i) s.negatives.push_back(d(rng));
    for (int i = 0; i < np; ++i) s.positives.push_back(d(rng) + shift);
    const auto y = youden_optimal(s);
    REQUIRE(y.bacc == Approx((y.j + 1.0) / 2.0).margin(1e-12));
    REQUIRE(y.j >= 0.0);
    REQUIRE(y.j <= 1.0);
  }
}

TEST_CASE("published J and BACC pairs agree with the identity up to rounding", "[metrics][youden]") {
  // Both columns were rounded to two decimals, so |BACC - (J+1)/2| <= 0.005 + 0.0025.
  const std::vector<std::pair<double, double>> pairs{
      {1, 1},       {0.64, 0.82}, {0.98, 0.99}, {0.5, 0.75},  {0.43, 0.71}, {0.93, 0.97}, {0.95, 0.97}, {0.96, 0.98},
      {0.81, 0.9},  {0.36, 0.68}, {0.86, 0.93}, {0.78, 0.89}, {0.29, 0.64}, {0.94, 0.97}, {0.89, 0.95}, {0.57, 0.79},
      {0.71, 0.86}, {0.92, 0.96}, {0.58, 0.79}, {0.77, 0.89}, {0.56, 0.78}, {0.68, 0.84}, {0.59, 0.79}, {0.91, 0.95},
      {0.21, 0.61}, {0.69, 0.85}, {0.83, 0.92}, {0.85, 0.92}, {0.76, 0.88}, {0.79, 0.89}, {0.74, 0.87}};
  for (const auto& [j, bacc] : pairs) {
    INFO("J = " << j << ", BACC = " << bacc);
    REQUIRE(std::abs(bacc - (j + 1.0) / 2.0) <= 0.0075 + 1e-12);
  }
  REQUIRE((0.64 + 1.0) / 2.0 == Approx(0.82));
  REQUIRE((0.5 + 1.0) / 2.0 == 0.75);
}

TEST_CASE("roc rejects an empty class", "[metrics][roc]") {
  REQUIRE_THROWS_AS(roc({{}, {1.0}}), Error);
  REQUIRE_THROWS_AS(youden_optimal({{1.0}, {}}), Error);
}

TEST_CASE("icc matches a hand-computed two-way ANOVA on a 3 x 2 matrix", "[metrics][icc]") {
  // x = [[1,2],[3,5],[6,7]]: grand mean 4, SSR = 25, SSC = 8/3, SST = 28,
  // SSE = 1/3; MSR = 12.5, MSC = 8/3, MSE = 1/6.
  // absolute agreement = (MSR-MSE)/(MSR+MSE+(2/3)(MSC-MSE)) = 37/43
  // consistency        = (MSR-MSE)/(MSR+MSE)                = 37/38
  const auto m = matrix(3, 2, {1, 2, 3, 5, 6, 7});
  REQUIRE(std::abs(icc(m, IccForm::two_way_random_single).icc - 37.0 / 43.0) <= 1e-9);
  REQUIRE(std::abs(icc(m, IccForm::two_way_mixed_single).icc - 37.0 / 38.0) <= 1e-9);
}

TEST_CASE("icc reproduces the classic six-target four-judge example", "[metrics][icc]") {
  const auto m = matrix(6, 4, {9, 2, 5, 8, 6, 1, 3, 2, 8, 4, 6, 8, 7, 1, 2, 6, 10, 5, 6, 9, 6, 2, 4, 7});
  REQUIRE(icc(m, IccForm::two_way_random_single).icc == Approx(0.29).margin(0.005));
  REQUIRE(icc(m, IccForm::two_way_mixed_single).icc == Approx(0.71).margin(0.01));
}

TEST_CASE("icc of identical columns is 1 and excellent", "[metrics][icc]") {
  const auto m = matrix(4, 3, {1, 1, 1, 4, 4, 4, 2, 2, 2, 9, 9, 9});
  for (auto form : {IccForm::two_way_random_single, IccForm::two_way_mixed_single}) {
    const auto r = icc(m, form);
    REQUIRE(r.icc == Approx(1.0).margin(1e-12));
    REQUIRE(r.label == Reliability::excellent);
  }
}

TEST_CASE("icc of independent noise is near zero", "[metrics][icc]") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(0.0, 1.0);
  ReliabilityMatrix m{50, 2, {}};
  for (std::size_t i = 0; i < 100; ++i) m.values.push_back(d(rng));
  REQUIRE(std::abs(icc(m).icc) <= 0.3);
}

TEST_CASE("icc invariances", "[metrics][icc]") {
  const auto base = matrix(4, 3, {1, 2, 4, 3, 3, 6, 7, 8, 8, 2, 5, 4});
  auto shifted = base;
  for (auto& v : shifted.values) v += 100.0;
  REQUIRE(icc(shifted).icc == Approx(icc(base).icc).margin(1e-9));

  auto column_shift = base;
  for (std::size_t r = 0; r < 4; ++r) column_shift.values[r * 3 + 1] += 5.0;
  REQUIRE(icc(column_shift, IccForm::two_way_mixed_single).icc ==
          Approx(icc(base, IccForm::two_way_mixed_single).icc).margin(1e-9));
}

TEST_CASE("icc drops incomplete rows and needs 2 x 2", "[metrics][icc]") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto with_missing = matrix(4, 2, {1, 2, nan, 5, 3, 5, 6, 7});
  const auto complete = matrix(3, 2, {1, 2, 3, 5, 6, 7});
  REQUIRE(icc(with_missing).icc == icc(complete).icc);

  try {
    icc(matrix(3, 2, {1, 2, nan, 1, 2, nan}));
    FAIL("expected an insufficient-data error");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::insufficient_data);
  }
  REQUIRE_THROWS_AS(icc(matrix(3, 1, {1, 2, 3})), Error);
}

TEST_CASE("reliability labels change exactly at 0.5, 0.75 and 0.9", "[metrics][icc]") {
  REQUIRE(classify_reliability(0.4999999) == Reliability::poor);
  REQUIRE(classify_reliability(0.5) == Reliability::moderate);
  REQUIRE(classify_reliability(0.7499999) == Reliability::moderate);
  REQUIRE(classify_reliability(0.75) == Reliability::good);
  REQUIRE(classify_reliability(0.8999999) == Reliability::good);
  REQUIRE(classify_reliability(0.9) == Reliability::excellent);
  REQUIRE(classify_reliability(-0.2) == Reliability::poor);
  REQUIRE(to_string(Reliability::good) == "good");
}

TEST_CASE("coefficient of variation uses the population sd", "[metrics][cv]") {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  REQUIRE(mean_of(x) == 5.0);
  REQUIRE(population_sd(x) == 2.0);
  REQUIRE(coefficient_of_variation(x) == 0.4);
  const std::vector<double> zero_mean{-1.0, 1.0};
  REQUIRE_THROWS_AS(coefficient_of_variation(zero_mean), Error);
}

TEST_CASE("icc form names round-trip", "[metrics][icc]") {
  for (auto form : {IccForm::two_way_random_single, IccForm::two_way_mixed_single}) {
    REQUIRE(parse_icc_form(to_string(form)) == form);
  }
  REQUIRE_THROWS_AS(parse_icc_form("icc1"), Error);
}
