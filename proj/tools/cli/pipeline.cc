#include "cli/pipeline.h"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "mcabrl/apriori.h"
#include "mcabrl/mca.h"
#include "mcabrl/miner.h"

namespace mcabrl::cli {

CsvOptions csv_options(const DataOptions& data) {
  CsvOptions options;
  options.label_column = data.label;
  options.missing_as_category = data.missing_as_category;
  for (const auto& bin : data.bins) {
    const auto colon = bin.rfind(':');
    if (colon == std::string::npos || colon == 0) {
      throw std::invalid_argument("--bins expects <column>:<2|3>, got '" + bin + "'");
    }
    const std::string count = bin.substr(colon + 1);
    if (count != "2" && count != "3") {
      throw std::invalid_argument("--bins count must be 2 or 3, got '" + bin + "'");
    }
    options.numeric_bins[bin.substr(0, colon)] = std::stoi(count);
  }
  return options;
}

CategoricalDataset load_dataset(const DataOptions& data) {
  if (data.path.empty()) throw std::invalid_argument("no dataset given (--data)");
  if (data.label.empty()) throw std::invalid_argument("no label column given (--label)");
  return load_csv(data.path, csv_options(data));
}

MinedRules mine_rules(const CategoricalDataset& dataset, const RunConfig& config) {
  MinedRules out;
  out.algorithm = config.algo;
  if (config.algo == "apriori") {
    AprioriConfig ac;
    ac.s_min = config.miner.s_min;
    ac.r_max = config.miner.r_max;
    ac.time_budget_seconds = config.apriori_budget_seconds;
    auto result = apriori_mine(dataset, ac);
    out.status = result.status;
    out.rules = std::move(result.rules);
    return out;
  }
  McaOptions mo;
  mo.max_components = config.components;
  const McaModel model = fit_mca(dataset, mo);
  MinerConfig mc = config.miner;
  mc.threads = config.threads;
  auto result = mine(dataset, model, mc);
  out.status = result.status;
  out.rules = std::move(result.rules);
  return out;
}

std::vector<Rule> candidate_rules(const std::vector<ScoredRule>& scored) {
  std::vector<Rule> out;
  std::set<Rule> seen;
  for (const auto& s : scored) {
    if (seen.insert(s.rule).second) out.push_back(s.rule);
  }
  return out;
}

Predictions predict_rows(const FittedRuleList& model, const EncodedTable& rows) {
  Predictions p;
  for (std::size_t i = 0; i < rows.n_rows(); ++i) {
    auto probs = predict_proba(model, rows.row(i));
    p.labels.push_back(
        static_cast<LabelIndex>(std::max_element(probs.begin(), probs.end()) - probs.begin()));
    p.probabilities.push_back(std::move(probs));
  }
  return p;
}

Predictions predict_rows(const FittedRuleList& model, const CategoricalDataset& dataset) {
  Predictions p;
  for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
    auto probs = predict_proba(model, dataset.row(i));
    p.labels.push_back(
        static_cast<LabelIndex>(std::max_element(probs.begin(), probs.end()) - probs.begin()));
    p.probabilities.push_back(std::move(probs));
  }
  return p;
}

EvalMetrics score_predictions(std::span<const LabelIndex> truth, const Predictions& predictions,
                              std::size_t n_labels) {
  EvalMetrics m;
  m.n = truth.size();
  m.accuracy = accuracy(truth, predictions.labels);
  m.confusion = ConfusionMatrix(truth, predictions.labels, n_labels);
  m.kappa = cohen_kappa(m.confusion);
  if (n_labels == 2) {
    const bool both = std::find(truth.begin(), truth.end(), 0u) != truth.end() &&
                      std::find(truth.begin(), truth.end(), 1u) != truth.end();
    if (both) {
      std::vector<double> scores;
      for (const auto& p : predictions.probabilities) scores.push_back(p[1]);
      m.roc_auc = roc_auc(truth, scores);
    }
  }
  return m;
}

CvReport cross_validate(const CategoricalDataset& dataset, const RunConfig& config) {
  const auto folds = stratified_kfold(dataset, config.folds, config.seed);
  CvReport report;
  report.confusion = ConfusionMatrix(dataset.n_labels());
  double auc_sum = 0.0;
  std::size_t auc_count = 0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto train_set = dataset.subset(folds[f].train);
    const auto test_set = dataset.subset(folds[f].test);
    const auto mined = mine_rules(train_set, config);
    BrlConfig bc = config.brl;
    bc.seed = config.seed;
    bc.threads = config.threads;
    const auto trained = train(train_set, candidate_rules(mined.rules), bc);

    FoldReport fr;
    fr.fold = static_cast<int>(f);
    fr.rules_mined = mined.rules.size();
    fr.list_length = trained.model.rules.size();
    fr.diagnostics = trained.diagnostics;
    fr.metrics = score_predictions(test_set.labels(), predict_rows(trained.model, test_set),
                                   dataset.n_labels());
    report.mean_accuracy += fr.metrics.accuracy;
    report.mean_kappa += fr.metrics.kappa;
    if (fr.metrics.roc_auc) {
      auc_sum += *fr.metrics.roc_auc;
      ++auc_count;
    }
    report.confusion += fr.metrics.confusion;
    report.folds.push_back(std::move(fr));
  }
  const auto k = static_cast<double>(folds.size());
  report.mean_accuracy /= k;
  report.mean_kappa /= k;
  if (auc_count > 0) report.mean_roc_auc = auc_sum / static_cast<double>(auc_count);
  return report;
}

}  // namespace mcabrl::cli
