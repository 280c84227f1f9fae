#ifndef MCABRL_METRICS_H_
#define MCABRL_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "mcabrl/dataset.h"

namespace mcabrl {

// Rows are true labels, columns predicted labels.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_labels);
  ConfusionMatrix(std::span<const LabelIndex> y_true, std::span<const LabelIndex> y_pred,
                  std::size_t n_labels);
  static ConfusionMatrix from_counts(std::vector<std::vector<std::size_t>> counts);

  void add(LabelIndex truth, LabelIndex predicted, std::size_t count = 1);

  std::size_t n_labels() const { return n_; }
  std::size_t at(LabelIndex truth, LabelIndex predicted) const { return counts_[truth * n_ + predicted]; }
  std::size_t total() const;
  std::size_t trace() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

 private:
  std::size_t n_;
  std::vector<std::size_t> counts_;
};

// Fraction of exact matches. Throws std::invalid_argument on empty input or
// a length mismatch.
double accuracy(std::span<const LabelIndex> y_true, std::span<const LabelIndex> y_pred);

// Mann-Whitney AUC of `scores` for the positive class (y_true == 1), ties
// counted as one half. Throws std::invalid_argument unless both classes occur.
double roc_auc(std::span<const LabelIndex> y_true, std::span<const double> scores);

// Cohen's kappa. Returns 0 (and warns on stderr) when chance agreement is 1.
double cohen_kappa(const ConfusionMatrix& confusion);

}  // namespace mcabrl

#endif  // MCABRL_METRICS_H_
