#include "mcabrl/metrics.h"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace mcabrl {

ConfusionMatrix::ConfusionMatrix(std::size_t n_labels) : n_(n_labels), counts_(n_labels * n_labels, 0) {}

ConfusionMatrix::ConfusionMatrix(std::span<const LabelIndex> y_true,
                                 std::span<const LabelIndex> y_pred, std::size_t n_labels)
    : ConfusionMatrix(n_labels) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("length mismatch");
  for (std::size_t i = 0; i < y_true.size(); ++i) add(y_true[i], y_pred[i]);
}

ConfusionMatrix ConfusionMatrix::from_counts(std::vector<std::vector<std::size_t>> counts) {
  ConfusionMatrix m(counts.size());
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (counts[t].size() != counts.size()) throw std::invalid_argument("confusion matrix must be square");
    for (std::size_t p = 0; p < counts.size(); ++p) {
      m.add(static_cast<LabelIndex>(t), static_cast<LabelIndex>(p), counts[t][p]);
    }
  }
  return m;
}

void ConfusionMatrix::add(LabelIndex truth, LabelIndex predicted, std::size_t count) {
  if (truth >= n_ || predicted >= n_) throw std::out_of_range("label outside confusion matrix");
  counts_[truth * n_ + predicted] += count;
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < n_; ++i) t += counts_[i * n_ + i];
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.n_ != n_) throw std::invalid_argument("confusion matrix size mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

double accuracy(std::span<const LabelIndex> y_true, std::span<const LabelIndex> y_pred) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("length mismatch");
  if (y_true.empty()) throw std::invalid_argument("accuracy of empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double roc_auc(std::span<const LabelIndex> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw std::invalid_argument("length mismatch");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of midranks of the positives.
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (y_true[order[t]] == 1) {
        rank_sum += midrank;
        ++positives;
      } else if (y_true[order[t]] != 0) {
        throw std::invalid_argument("roc_auc needs binary labels");
      }
    }
    i = j;
  }
  const std::size_t negatives = y_true.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("roc_auc needs both classes present");
  }
  const double p = static_cast<double>(positives);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

double cohen_kappa(const ConfusionMatrix& confusion) {
  const std::size_t total = confusion.total();
  if (total == 0) throw std::invalid_argument("cohen_kappa of an empty confusion matrix");
  const auto n = static_cast<double>(total);
  const std::size_t l = confusion.n_labels();
  double chance = 0.0;
  for (LabelIndex k = 0; k < l; ++k) {
    double row = 0.0;
    double col = 0.0;
    for (LabelIndex j = 0; j < l; ++j) {
      row += static_cast<double>(confusion.at(k, j));
      col += static_cast<double>(confusion.at(j, k));
    }
    chance += (row / n) * (col / n);
  }
  const double observed = static_cast<double>(confusion.trace()) / n;
  if (chance >= 1.0) {
    std::cerr << "warning: chance agreement is 1, kappa reported as 0\n";
    return 0.0;
  }
  return (observed - chance) / (1.0 - chance);
}

}  // namespace mcabrl
