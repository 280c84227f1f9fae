#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mcabrl/metrics.h"
#include "oracles.h"

namespace mcabrl {
namespace {

using oracles::trapezoid_auc;

TEST(Accuracy, TrivialExample) {
  const std::vector<LabelIndex> y{0, 1, 1, 0}, p{0, 1, 0, 0};
  EXPECT_DOUBLE_EQ(accuracy(y, p), 0.75);
}

TEST(Accuracy, RejectsEmptyAndMismatchedInput) {
  const std::vector<LabelIndex> empty, one{0}, two{0, 1};
  EXPECT_THROW(accuracy(empty, empty), std::invalid_argument);
  EXPECT_THROW(accuracy(one, two), std::invalid_argument);
}

TEST(RocAuc, PerfectAndReversedRankings) {
  const std::vector<LabelIndex> y{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(roc_auc(y, std::vector<double>{0.1, 0.4, 0.35, 0.8}), 0.75);
  EXPECT_DOUBLE_EQ(roc_auc(y, std::vector<double>{0.1, 0.2, 0.3, 0.4}), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(y, std::vector<double>{0.4, 0.3, 0.2, 0.1}), 0.0);
  EXPECT_DOUBLE_EQ(roc_auc(y, std::vector<double>{0.5, 0.5, 0.5, 0.5}), 0.5);
}

TEST(RocAuc, SingleClassIsRejected) {
  const std::vector<LabelIndex> y{1, 1, 1};
  EXPECT_THROW(roc_auc(y, std::vector<double>{0.1, 0.2, 0.3}), std::invalid_argument);
}

TEST(RocAuc, MatchesTrapezoidOracleWithTies) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 40;
    std::vector<LabelIndex> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i < 2 ? static_cast<LabelIndex>(i) : std::uniform_int_distribution<LabelIndex>(0, 1)(rng);
      s[i] = std::uniform_int_distribution<int>(0, 6)(rng) / 6.0;  // many ties
    }
    const double a = roc_auc(y, s);
    EXPECT_NEAR(a, trapezoid_auc(y, s), 1e-12) << "trial " << trial;
    std::vector<double> neg(s);
    for (auto& v : neg) v = -v;
    EXPECT_NEAR(a + roc_auc(y, neg), 1.0, 1e-12);
  }
}

TEST(Kappa, TrivialExamples) {
  EXPECT_DOUBLE_EQ(cohen_kappa(ConfusionMatrix::from_counts({{1, 1}, {1, 1}})), 0.0);
  EXPECT_DOUBLE_EQ(cohen_kappa(ConfusionMatrix::from_counts({{5, 0}, {0, 5}})), 1.0);
  EXPECT_NEAR(cohen_kappa(ConfusionMatrix::from_counts({{20, 5}, {10, 15}})),
              oracles::kappa({{20, 5}, {10, 15}}), 1e-15);
}

TEST(Kappa, FullChanceAgreementGivesZero) {
  // a single populated cell: p_o = p_e = 1
  EXPECT_DOUBLE_EQ(cohen_kappa(ConfusionMatrix::from_counts({{4, 0}, {0, 0}})), 0.0);
}

TEST(Kappa, MatchesOracleAndIsPermutationInvariant) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t l = 2 + trial % 4;
    std::vector<std::vector<std::size_t>> counts(l, std::vector<std::size_t>(l));
    std::vector<std::vector<double>> as_double(l, std::vector<double>(l));
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = 0; j < l; ++j) {
        counts[i][j] = std::uniform_int_distribution<std::size_t>(0, 20)(rng) + (i == j ? 10 : 0);
        as_double[i][j] = static_cast<double>(counts[i][j]);
      }
    }
    const double k = cohen_kappa(ConfusionMatrix::from_counts(counts));
    EXPECT_NEAR(k, oracles::kappa(as_double), 1e-12);
    std::vector<std::size_t> perm(l);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<std::size_t>> permuted(l, std::vector<std::size_t>(l));
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = 0; j < l; ++j) permuted[perm[i]][perm[j]] = counts[i][j];
    }
    EXPECT_NEAR(cohen_kappa(ConfusionMatrix::from_counts(permuted)), k, 1e-12);
  }
}

TEST(Confusion, CountsAndAccumulates) {
  const std::vector<LabelIndex> y{0, 1, 2, 2}, p{0, 2, 2, 1};
  ConfusionMatrix m(y, p, 3);
  EXPECT_EQ(m.at(1, 2), 1u);
  EXPECT_EQ(m.at(2, 2), 1u);
  EXPECT_EQ(m.total(), 4u);
  EXPECT_EQ(m.trace(), 2u);
  m += m;
  EXPECT_EQ(m.total(), 8u);
  EXPECT_EQ(m.at(2, 1), 2u);
}

}  // namespace
}  // namespace mcabrl
