#include "mcabrl/apriori.h"

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>

namespace mcabrl {

namespace {

using Clock = std::chrono::steady_clock;

struct Frequent {
  std::vector<Literal> items;
  RowBits rows;  // class rows covered by the itemset
};

class Budget {
 public:
  explicit Budget(const AprioriConfig& config)
      : config_(config), start_(Clock::now()) {}

  bool exceeded(std::size_t itemsets) {
    if (itemsets > config_.max_itemsets) return true;
    // Checking the clock on every candidate is measurable; sample it.
    if ((++ticks_ & 1023) != 0) return false;
    const std::chrono::duration<double> elapsed = Clock::now() - start_;
    return elapsed.count() > config_.time_budget_seconds;
  }

 private:
  const AprioriConfig& config_;
  Clock::time_point start_;
  std::size_t ticks_ = 0;
};

}  // namespace

AprioriResult apriori_mine(const CategoricalDataset& dataset, const AprioriConfig& config) {
  if (!(config.s_min > 0.0)) throw std::invalid_argument("s_min must be > 0");
  if (config.r_max < 1) throw std::invalid_argument("r_max must be >= 1");

  const RowIndex index(dataset);
  const auto literals = dataset.literals();
  Budget budget(config);
  AprioriResult result;
  std::size_t stored = 0;

  for (LabelIndex k = 0; k < dataset.n_labels(); ++k) {
    const std::size_t class_size = index.label_count(k);
    if (class_size == 0) continue;
    const auto min_count = [&] {
      // smallest integer count c with c / class_size >= s_min
      std::size_t c = 0;
      while (c <= class_size &&
             static_cast<double>(c) / static_cast<double>(class_size) < config.s_min) {
        ++c;
      }
      return c;
    }();
    if (min_count > class_size) continue;

    std::vector<Frequent> level;
    for (const auto& l : literals) {
      ++result.candidates_counted;
      RowBits rows = index.literal(l) & index.label(k);
      if (rows.count() >= min_count) level.push_back({{l}, std::move(rows)});
    }

    for (int len = 1;; ++len) {
      for (const auto& f : level) {
        const Rule rule(f.items);
        const std::size_t covered = f.rows.count();
        const std::size_t total = index.rule_rows(rule).count();
        result.rules.push_back({rule, k,
                                static_cast<double>(covered) / static_cast<double>(total),
                                static_cast<double>(covered) / static_cast<double>(class_size)});
        if (budget.exceeded(++stored)) {
          result.status = MineStatus::kBudgetExceeded;
          return result;
        }
      }
      if (len >= config.r_max || level.size() < 2) break;

      std::set<std::vector<Literal>> frequent_keys;
      for (const auto& f : level) frequent_keys.insert(f.items);

      // level is sorted lexicographically, so itemsets sharing a prefix of
      // length len-1 are contiguous.
      std::vector<Frequent> next;
      std::vector<Literal> subset(len);
      for (std::size_t a = 0; a < level.size(); ++a) {
        for (std::size_t b = a + 1; b < level.size(); ++b) {
          const auto& x = level[a].items;
          const auto& y = level[b].items;
          if (!std::equal(x.begin(), x.end() - 1, y.begin())) break;
          const Literal& last_x = x.back();
          const Literal& last_y = y.back();
          if (last_x.attribute == last_y.attribute) continue;

          std::vector<Literal> candidate(x);
          candidate.push_back(last_y);
          // Downward closure: all len-subsets must be frequent. The two
          // generating parents already are.
          bool closed = true;
          for (std::size_t drop = 0; drop + 2 < candidate.size() && closed; ++drop) {
            std::size_t w = 0;
            for (std::size_t i = 0; i < candidate.size(); ++i) {
              if (i != drop) subset[w++] = candidate[i];
            }
            closed = frequent_keys.contains(subset);
          }
          if (!closed) continue;

          ++result.candidates_counted;
          if (budget.exceeded(stored)) {
            result.status = MineStatus::kBudgetExceeded;
            return result;
          }
          RowBits rows = level[a].rows & index.literal(last_y);
          if (rows.count() >= min_count) next.push_back({std::move(candidate), std::move(rows)});
        }
      }
      level = std::move(next);
      if (level.empty()) break;
    }
  }

  std::stable_sort(result.rules.begin(), result.rules.end(),
                   [](const ScoredRule& a, const ScoredRule& b) {
                     if (a.label != b.label) return a.label < b.label;
                     return shorter_then_canonical(a.rule, b.rule);
                   });
  if (result.rules.empty()) result.status = MineStatus::kEmpty;
  return result;
}

}  // namespace mcabrl
