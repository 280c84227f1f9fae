#ifndef MCABRL_APRIORI_H_
#define MCABRL_APRIORI_H_

#include <cstddef>
#include <limits>
#include <vector>

#include "mcabrl/dataset.h"
#include "mcabrl/rule.h"

namespace mcabrl {

struct AprioriConfig {
  double s_min = 0.3;
  int r_max = 2;
  // Runaway runs stop with kBudgetExceeded instead of hanging.
  double time_budget_seconds = std::numeric_limits<double>::infinity();
  std::size_t max_itemsets = std::numeric_limits<std::size_t>::max();
};

struct AprioriResult {
  MineStatus status = MineStatus::kOk;
  // One record per (frequent itemset, label); score is the confidence
  // P(label | rule), support is supp_k(rule). Sorted by label, then length,
  // then canonical order.
  std::vector<ScoredRule> rules;
  std::size_t candidates_counted = 0;
};

// Level-wise frequent-itemset mining run separately over each label's rows.
// Candidates of length j+1 join two frequent j-itemsets sharing their first
// j-1 literals and survive only if every j-subset is frequent.
AprioriResult apriori_mine(const CategoricalDataset& dataset, const AprioriConfig& config);

}  // namespace mcabrl

#endif  // MCABRL_APRIORI_H_
