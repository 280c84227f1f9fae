#ifndef MCABRL_CLI_PIPELINE_H_
#define MCABRL_CLI_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "cli/run_config.h"
#include "mcabrl/brl.h"
#include "mcabrl/dataset.h"
#include "mcabrl/metrics.h"
#include "mcabrl/rule.h"

namespace mcabrl::cli {

CsvOptions csv_options(const DataOptions& data);  // throws std::invalid_argument
CategoricalDataset load_dataset(const DataOptions& data);

struct MinedRules {
  std::string algorithm;
  MineStatus status = MineStatus::kOk;
  std::vector<ScoredRule> rules;
};

// MCA-miner or Apriori according to config.algo.
MinedRules mine_rules(const CategoricalDataset& dataset, const RunConfig& config);

// Distinct rules in first-seen order: the candidate set handed to the sampler.
std::vector<Rule> candidate_rules(const std::vector<ScoredRule>& scored);

struct Predictions {
  std::vector<LabelIndex> labels;
  std::vector<std::vector<double>> probabilities;
};
Predictions predict_rows(const FittedRuleList& model, const EncodedTable& rows);
Predictions predict_rows(const FittedRuleList& model, const CategoricalDataset& dataset);

struct EvalMetrics {
  std::size_t n = 0;
  double accuracy = 0.0;
  std::optional<double> roc_auc;  // binary tasks only
  double kappa = 0.0;
  ConfusionMatrix confusion{2};
};
EvalMetrics score_predictions(std::span<const LabelIndex> truth, const Predictions& predictions,
                              std::size_t n_labels);

struct FoldReport {
  int fold = 0;
  EvalMetrics metrics;
  std::size_t rules_mined = 0;
  std::size_t list_length = 0;
  TrainDiagnostics diagnostics;
};

struct CvReport {
  std::vector<FoldReport> folds;
  double mean_accuracy = 0.0;
  std::optional<double> mean_roc_auc;
  double mean_kappa = 0.0;
  ConfusionMatrix confusion{2};  // summed over folds
};

// Stratified k-fold: mining, MCA fit and sampling see only the training rows
// of each fold.
CvReport cross_validate(const CategoricalDataset& dataset, const RunConfig& config);

}  // namespace mcabrl::cli

#endif  // MCABRL_CLI_PIPELINE_H_
