#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "mcabrl/dataset.h"

namespace mcabrl {
namespace {

CategoricalDataset parse(const std::string& text, const CsvOptions& options) {
  std::istringstream in(text);
  return parse_csv(in, options);
}

CsvOptions label(const std::string& column) {
  CsvOptions o;
  o.label_column = column;
  return o;
}

// Hand-computed equal-frequency binning: linear-interpolated quantiles at
// j/bins, values at or below an edge go to the lower bin.
std::vector<CategoryIndex> quantile_oracle(std::vector<double> values, int bins) {
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (int j = 1; j < bins; ++j) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * j / bins;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double q = sorted[lo] + (h - static_cast<double>(lo)) *
                                      (sorted[std::min(lo + 1, sorted.size() - 1)] - sorted[lo]);
    edges.push_back(q);
  }
  std::vector<CategoryIndex> out;
  for (const double v : values) {
    CategoryIndex b = 0;
    while (b < edges.size() && v > edges[b]) ++b;
    out.push_back(b);
  }
  return out;
}

TEST(Csv, LoadsFourRowBinaryDataset) {
  const auto d = parse("x,y\na,0\nb,1\na,1\nb,0\n", label("y"));
  EXPECT_EQ(d.n_rows(), 4u);
  EXPECT_EQ(d.n_attributes(), 1u);
  EXPECT_EQ(d.schema(0).categories.size(), 2u);
  EXPECT_EQ(d.n_labels(), 2u);
  EXPECT_EQ(d.label_names(), (std::vector<std::string>{"0", "1"}));
}

TEST(Csv, LabelOnlyFileIsRejected) {
  EXPECT_THROW(parse("y\n0\n1\n", label("y")), DataError);
}

TEST(Csv, MissingLabelColumnIsRejected) {
  EXPECT_THROW(parse("x,y\na,0\nb,1\n", label("z")), DataError);
}

TEST(Csv, EmptyFileIsRejected) { EXPECT_THROW(parse("", label("y")), DataError); }

TEST(Csv, EmptyCellIsRejectedWithRowNumber) {
  try {
    parse("x,z,y\na,p,0\n,q,1\nb,q,1\n", label("y"));
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(Csv, MissingAsCategoryKeepsEmptyCells) {
  auto o = label("y");
  o.missing_as_category = true;
  const auto d = parse("x,y\na,0\n,1\nb,1\n", o);
  EXPECT_EQ(d.schema(0).categories, (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(d.cell(1, 0), 1u);
}

TEST(Csv, NonNumericTextInNumericColumnIsRejected) {
  auto o = label("y");
  o.numeric_bins["v"] = 2;
  EXPECT_THROW(parse("v,y\n1,0\n2,1\nabc,1\n3,0\n", o), DataError);
}

TEST(Csv, QuotedFieldsAndCrLf) {
  const auto d = parse("\"name, with comma\",y\r\n\"he said \"\"hi\"\"\",a\r\nplain,b\r\n", label("y"));
  EXPECT_EQ(d.schema(0).name, "name, with comma");
  EXPECT_EQ(d.schema(0).categories[0], "he said \"hi\"");
}

TEST(Csv, RaggedRowIsRejected) {
  EXPECT_THROW(parse("x,y\na,0\nb\n", label("y")), DataError);
}

TEST(Csv, CategoriesInFirstOccurrenceOrder) {
  const auto d = parse("x,y\nzeta,1\nalpha,0\nzeta,0\nmid,1\n", label("y"));
  EXPECT_EQ(d.schema(0).categories, (std::vector<std::string>{"zeta", "alpha", "mid"}));
  EXPECT_EQ(d.label_names(), (std::vector<std::string>{"1", "0"}));
}

TEST(Csv, ConstantColumnIsDropped) {
  const auto d = parse("c,x,y\nk,a,0\nk,b,1\nk,a,1\n", label("y"));
  ASSERT_EQ(d.n_attributes(), 1u);
  EXPECT_EQ(d.schema(0).name, "x");
}

TEST(Csv, RoundTripReproducesDataset) {
  auto o = label("y");
  o.numeric_bins["v"] = 3;
  const auto d = parse("x,v,y\na,1.5,p\nb,2.5,q\n\"c,d\",3.5,p\na,4.5,q\nb,5.5,p\na,6.5,q\n", o);
  std::ostringstream out;
  write_csv(d, out);
  std::istringstream in(out.str());
  const auto back = load_csv_with_schema(in, d.schemas(), d.label_name(), d.label_names());
  EXPECT_EQ(back.schemas(), d.schemas());
  EXPECT_EQ(back.labels(), d.labels());
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    for (std::size_t j = 0; j < d.n_attributes(); ++j) EXPECT_EQ(back.cell(i, j), d.cell(i, j));
  }
  // Reloading from scratch also gives identical categorical columns.
  std::istringstream again(out.str());
  const auto plain = parse_csv(again, label("y"));
  EXPECT_EQ(plain.labels(), d.labels());
  EXPECT_EQ(plain.schema(0), d.schema(0));
}

TEST(Csv, UnknownCategoryAgainstSchemaIsRejected) {
  const auto d = parse("x,y\na,0\nb,1\n", label("y"));
  std::istringstream in("x,y\nc,0\n");
  EXPECT_THROW(load_csv_with_schema(in, d.schemas(), d.label_name(), d.label_names()), DataError);
}

TEST(Quantize, MedianSplit) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_EQ(quantize_numeric(v, 2), (std::vector<CategoryIndex>{0, 0, 1, 1}));
}

TEST(Quantize, SingleDistinctValueIsRejected) {
  const std::vector<double> v{5, 5, 5, 5};
  EXPECT_THROW(quantize_numeric(v, 2), DataError);
}

TEST(Quantize, ThreeBinsOfSixValuesMatchOracle) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6};
  const auto got = quantize_numeric(v, 3);
  EXPECT_EQ(got, quantile_oracle(v, 3));
  EXPECT_EQ(got, (std::vector<CategoryIndex>{0, 0, 1, 1, 2, 2}));
}

TEST(Quantize, BoundaryValuesGoToLowerBin) {
  const std::vector<double> v{1, 2, 2, 2, 3, 4};
  const auto edges = quantile_edges(v, 2);
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_DOUBLE_EQ(edges[0], 2.0);
  EXPECT_EQ(bin_of(2.0, edges), 0u);
  EXPECT_EQ(bin_of(2.0000001, edges), 1u);
}

TEST(Quantize, RandomInputsMatchOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> value(0, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(12 + trial % 17);
    for (auto& x : v) x = value(rng) * 0.25;
    for (const int bins : {2, 3}) {
      const auto expected = quantile_oracle(v, bins);
      // Inputs whose raw quantile edges leave a bin empty are adjusted by the
      // implementation; they are covered by EveryBinIsUsed.
      std::set<CategoryIndex> used(expected.begin(), expected.end());
      if (used.size() != static_cast<std::size_t>(bins)) continue;
      EXPECT_EQ(quantize_numeric(v, bins), expected) << "trial " << trial;
    }
  }
}

TEST(Quantize, PermutationEquivariant) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  std::vector<double> v(50);
  for (auto& x : v) x = gauss(rng);
  const auto base = quantize_numeric(v, 3);
  std::vector<std::size_t> perm(v.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<double> shuffled;
  for (const auto i : perm) shuffled.push_back(v[i]);
  const auto got = quantize_numeric(shuffled, 3);
  for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(got[i], base[perm[i]]);
}

TEST(Quantize, EveryBinIsUsed) {
  std::vector<double> v{1, 1, 1, 1, 1, 1, 1, 2, 3};
  const auto bins = quantize_numeric(v, 2);
  EXPECT_EQ(std::set<CategoryIndex>(bins.begin(), bins.end()).size(), 2u);
}

TEST(Quantize, BinLabelsDescribeIntervals) {
  const std::vector<double> edges{2.0, 4.5};
  EXPECT_EQ(bin_labels(edges), (std::vector<std::string>{"<=2", "(2,4.5]", ">4.5"}));
}

void check_partition(const std::vector<Fold>& folds, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& f : folds) {
    for (const auto i : f.test) ++seen[i];
    std::vector<int> in_fold(n, 0);
    for (const auto i : f.train) ++in_fold[i];
    for (const auto i : f.test) ++in_fold[i];
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(in_fold[i], 1) << "row " << i;
  }
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(seen[i], 1) << "row " << i;
}

TEST(Folds, PerfectlyDivisible) {
  std::vector<LabelIndex> y(10);
  for (std::size_t i = 0; i < 10; ++i) y[i] = i % 2;
  const auto folds = stratified_kfold(y, 2, 5, 42);
  ASSERT_EQ(folds.size(), 5u);
  check_partition(folds, y.size());
  for (const auto& f : folds) {
    ASSERT_EQ(f.test.size(), 2u);
    EXPECT_NE(y[f.test[0]], y[f.test[1]]);
  }
}

TEST(Folds, SingleFoldIsRejected) {
  const std::vector<LabelIndex> y{0, 1, 0, 1};
  EXPECT_THROW(stratified_kfold(y, 2, 1, 0), DataError);
}

TEST(Folds, SmallClassIsRejected) {
  const std::vector<LabelIndex> y{0, 0, 0, 0, 0, 1, 1};
  EXPECT_THROW(stratified_kfold(y, 2, 3, 0), DataError);
}

TEST(Folds, FourClassCountsWithinOne) {
  const std::vector<std::size_t> sizes{130, 50, 49, 43};
  std::vector<LabelIndex> y;
  for (std::size_t c = 0; c < sizes.size(); ++c) y.insert(y.end(), sizes[c], c);
  std::shuffle(y.begin(), y.end(), std::mt19937_64(5));
  const auto folds = stratified_kfold(y, 4, 5, 9);
  check_partition(folds, y.size());
  const double n = static_cast<double>(y.size());
  for (const auto& f : folds) {
    std::vector<std::size_t> count(4, 0);
    for (const auto i : f.test) ++count[y[i]];
    const double fold_size = static_cast<double>(f.test.size());
    for (std::size_t c = 0; c < 4; ++c) {
      const double expected = static_cast<double>(sizes[c]) / 5.0;
      EXPECT_LE(std::abs(static_cast<double>(count[c]) - expected), 1.0) << "class " << c;
      EXPECT_LE(std::abs(count[c] / fold_size - sizes[c] / n), 1.0 / fold_size + 1e-12);
    }
  }
}

TEST(Folds, DeterministicGivenSeed) {
  std::vector<LabelIndex> y(37);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i * 7) % 3;
  const auto a = stratified_kfold(y, 3, 4, 17);
  const auto b = stratified_kfold(y, 3, 4, 17);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t f = 0; f < a.size(); ++f) {
    EXPECT_EQ(a[f].test, b[f].test);
    EXPECT_EQ(a[f].train, b[f].train);
  }
}

TEST(Dataset, ConstructorValidatesInvariants) {
  AttributeSchema s{"a", {"x", "y"}};
  EXPECT_THROW(CategoricalDataset({s}, "y", {"only"}, {0}, {0}), DataError);
  EXPECT_THROW(CategoricalDataset({s}, "y", {"p", "q"}, {2}, {0}), DataError);
  EXPECT_THROW(CategoricalDataset({s}, "y", {"p", "q"}, {0}, {2}), DataError);
  AttributeSchema single{"b", {"x"}};
  EXPECT_THROW(CategoricalDataset({single}, "y", {"p", "q"}, {0}, {0}), DataError);
  AttributeSchema dup{"c", {"x", "x"}};
  EXPECT_THROW(CategoricalDataset({dup}, "y", {"p", "q"}, {0}, {0}), DataError);
}

TEST(Dataset, SubsetKeepsSchema) {
  const auto d = parse("x,y\na,0\nb,1\na,1\nb,0\n", label("y"));
  const std::vector<std::size_t> rows{3, 1};
  const auto s = d.subset(rows);
  EXPECT_EQ(s.n_rows(), 2u);
  EXPECT_EQ(s.schemas(), d.schemas());
  EXPECT_EQ(s.cell(0, 0), d.cell(3, 0));
  EXPECT_EQ(s.label(1), d.label(1));
}

}  // namespace
}  // namespace mcabrl
