#ifndef MCABRL_MINER_H_
#define MCABRL_MINER_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "mcabrl/dataset.h"
#include "mcabrl/mca.h"
#include "mcabrl/rule.h"

namespace mcabrl {

struct MinerConfig {
  int r_max = 2;
  double s_min = 0.3;
  double mu_min = 0.5;
  int top_m = 70;
  // false scores literals by |rho| instead of rho.
  bool signed_scores = true;
  // Workers for the per-label loop; 0 means one per hardware thread.
  unsigned threads = 0;

  void validate() const;  // throws std::invalid_argument
};

// rho_{l,k} for every literal of a dataset and every label. Literals whose
// score is undefined (zero-norm coordinate row, e.g. a category covering every
// row, or a category absent from the fitted data) are marked ineligible.
class ScoreTable {
 public:
  ScoreTable(const CategoricalDataset& dataset, const McaModel& model, bool signed_scores = true);
  // Direct construction, mostly for tests: scores[literal_index][label].
  ScoreTable(std::vector<Literal> literals, std::vector<std::vector<std::optional<double>>> scores);

  std::size_t n_labels() const { return n_labels_; }
  const std::vector<Literal>& literals() const { return literals_; }
  // Literals with a defined score for every label, in canonical order.
  const std::vector<Literal>& eligible() const { return eligible_; }

  bool defined(const Literal& literal) const;
  // Throws ScoreUndefined for an ineligible literal.
  double score(const Literal& literal, LabelIndex label) const;
  // max over eligible literals of rho_{l,k}
  double max_score(LabelIndex label) const;

 private:
  std::size_t index_of(const Literal& literal) const;

  std::size_t n_labels_ = 0;
  std::vector<Literal> literals_;
  std::vector<std::vector<std::optional<double>>> scores_;
  std::vector<Literal> eligible_;
};

// mu_k(r): mean literal score of the rule for label k, summed in canonical
// literal order.
double rule_score(const Rule& rule, const ScoreTable& scores, LabelIndex label);

// m_k(|r|) = ((|r| + 1) mu_min - rho_bar_k) / |r|. Some extension of r can
// reach mu_min only if mu_k(r) >= m_k(|r|).
double score_bound(std::size_t current_len, double mu_min, double rho_bar);

struct MineResult {
  MineStatus status = MineStatus::kOk;
  // Top rules for each label, sorted by descending score, ties broken by
  // shorter-then-canonical order.
  std::vector<std::vector<ScoredRule>> per_label;
  // Union over labels. A rule found under several labels appears once, with
  // the record of its best score (lowest label on ties). Sorted by label, then
  // per-label order.
  std::vector<ScoredRule> rules;
};

MineResult mine(const CategoricalDataset& dataset, const McaModel& model,
                const MinerConfig& config);
MineResult mine(const CategoricalDataset& dataset, const ScoreTable& scores,
                const MinerConfig& config);

// Descending score, then shorter-then-canonical.
bool ranks_before(const ScoredRule& a, const ScoredRule& b);
// Deduplicated union of per-label lists, as stored in MineResult::rules.
std::vector<ScoredRule> merge_labels(const std::vector<std::vector<ScoredRule>>& per_label);

}  // namespace mcabrl

#endif  // MCABRL_MINER_H_
