#include "cli/commands.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli/benchmark.h"
#include "cli/pipeline.h"
#include "mcabrl/serialization.h"

namespace mcabrl::cli {

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string or_default(const std::string& path, const char* fallback) {
  return path.empty() ? fallback : path;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw std::invalid_argument(std::string("missing required option ") + flag);
}

std::string confusion_text(const ConfusionMatrix& m, const std::vector<std::string>& names) {
  std::size_t width = 9;  // corner header
  for (const auto& n : names) width = std::max(width, n.size());
  for (LabelIndex t = 0; t < m.n_labels(); ++t) {
    for (LabelIndex p = 0; p < m.n_labels(); ++p) {
      width = std::max(width, std::to_string(m.at(t, p)).size());
    }
  }
  std::ostringstream out;
  auto cell = [&](const std::string& s) { out << std::string(width + 2 - s.size(), ' ') << s; };
  cell("true\\pred");
  for (const auto& n : names) cell(n);
  out << '\n';
  for (LabelIndex t = 0; t < m.n_labels(); ++t) {
    cell(names[t]);
    for (LabelIndex p = 0; p < m.n_labels(); ++p) cell(std::to_string(m.at(t, p)));
    out << '\n';
  }
  return out.str();
}

void metric_records(std::ostringstream& csv, const std::string& scope, const EvalMetrics& m,
                    const std::vector<std::string>& names) {
  csv << scope << ",n," << m.n << '\n';
  csv << scope << ",accuracy," << format_double(m.accuracy) << '\n';
  if (m.roc_auc) csv << scope << ",roc_auc," << format_double(*m.roc_auc) << '\n';
  csv << scope << ",kappa," << format_double(m.kappa) << '\n';
  for (LabelIndex t = 0; t < m.confusion.n_labels(); ++t) {
    for (LabelIndex p = 0; p < m.confusion.n_labels(); ++p) {
      csv << scope << ",confusion:" << names[t] << ':' << names[p] << ',' << m.confusion.at(t, p)
          << '\n';
    }
  }
}

}  // namespace

int cmd_mine(const RunConfig& config) {
  const auto data = load_dataset(config.data);
  const auto mined = mine_rules(data, config);
  RuleFile file{SchemaInfo::of(data), mined.algorithm, mined.status, mining_record(config),
                mined.rules};
  const auto out = or_default(config.out_path, "rules.json");
  write_file_atomic(out, to_json(file));
  std::cout << "mined " << mined.rules.size() << " rules (" << to_string(mined.status) << ") from "
            << data.n_rows() << " rows, " << data.n_attributes() << " attributes -> " << out
            << '\n';
  if (mined.status == MineStatus::kEmpty) {
    std::cerr << "warning: no rule passed the thresholds; try lower --s-min or --mu-min\n";
  } else if (mined.status == MineStatus::kBudgetExceeded) {
    std::cerr << "warning: time budget exceeded; the rule file is incomplete\n";
  }
  return kExitOk;
}

int cmd_train(const RunConfig& config) {
  require(config.rules_path, "--rules");
  require(config.data.path, "--data");
  const RuleFile rules = parse_rule_file(read_file(config.rules_path));
  auto in = open_input(config.data.path);
  const auto data = load_csv_with_schema(in, rules.schema.attributes, rules.schema.label_name,
                                         rules.schema.label_names);
  if (rules.rules.empty()) {
    std::cerr << "warning: rule file is empty; the model is the default clause only\n";
  }
  BrlConfig bc = config.brl;
  bc.seed = config.seed;
  bc.threads = config.threads;
  const auto result = train(data, candidate_rules(rules.rules), bc);

  ModelFile file{rules.schema, training_record(config), result.model, result.diagnostics};
  const auto out = or_default(config.out_path, "model.json");
  write_file_atomic(out, to_json(file));
  const auto& d = result.diagnostics;
  std::cout << "rule list with " << result.model.rules.size() << " rules after " << d.iterations
            << " iterations per chain, acceptance " << fixed(d.acceptance_rate, 3);
  if (d.rhat_checked) std::cout << ", R-hat " << fixed(d.final_rhat, 4);
  std::cout << " -> " << out << '\n';
  if (d.rhat_checked && !d.converged) {
    std::cerr << "warning: chains did not reach R-hat <= " << config.brl.rhat_threshold
              << " within " << config.brl.max_iters << " iterations; raise --max-iters\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_predict(const RunConfig& config) {
  require(config.model_path, "--model");
  require(config.data.path, "--data");
  const ModelFile model = parse_model_file(read_file(config.model_path));
  auto in = open_input(config.data.path);
  const CsvTable table = read_csv(in);
  const auto rows = encode_csv(table, model.schema.attributes, model.schema.label_name,
                               model.schema.label_names);
  const auto predictions = predict_rows(model.model, rows);

  std::ostringstream csv;
  std::vector<std::string> header{"row", "prediction"};
  for (const auto& n : model.schema.label_names) header.push_back("P(" + n + ")");
  write_csv_row(csv, header);
  for (std::size_t i = 0; i < rows.n_rows(); ++i) {
    std::vector<std::string> fields{std::to_string(i + 1),
                                    model.schema.label_names[predictions.labels[i]]};
    for (const double p : predictions.probabilities[i]) fields.push_back(format_double(p));
    write_csv_row(csv, fields);
  }
  const auto out = or_default(config.out_path, "predictions.csv");
  write_file_atomic(out, csv.str());
  std::cout << "predicted " << rows.n_rows() << " rows -> " << out << '\n';
  if (rows.labels) {
    std::cout << "accuracy " << fixed(accuracy(*rows.labels, predictions.labels)) << '\n';
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig& config) {
  std::ostringstream csv;
  csv << "scope,metric,value\n";
  if (config.folds > 0) {
    const auto data = load_dataset(config.data);
    const auto report = cross_validate(data, config);
    const auto& names = data.label_names();
    std::printf("%6s  %8s  %8s  %8s  %6s  %6s  %10s\n", "fold", "accuracy", "roc_auc", "kappa",
                "mined", "length", "iterations");
    for (const auto& f : report.folds) {
      std::printf("%6d  %8.4f  %8s  %8.4f  %6zu  %6zu  %10zu\n", f.fold, f.metrics.accuracy,
                  f.metrics.roc_auc ? fixed(*f.metrics.roc_auc).c_str() : "-", f.metrics.kappa,
                  f.rules_mined, f.list_length, f.diagnostics.iterations);
      const std::string scope = "fold" + std::to_string(f.fold);
      metric_records(csv, scope, f.metrics, names);
      csv << scope << ",rules_mined," << f.rules_mined << '\n';
      csv << scope << ",list_length," << f.list_length << '\n';
      csv << scope << ",iterations," << f.diagnostics.iterations << '\n';
      csv << scope << ",converged," << (f.diagnostics.converged ? 1 : 0) << '\n';
    }
    std::printf("%6s  %8.4f  %8s  %8.4f\n\n", "mean", report.mean_accuracy,
                report.mean_roc_auc ? fixed(*report.mean_roc_auc).c_str() : "-",
                report.mean_kappa);
    std::cout << confusion_text(report.confusion, names);
    csv << "mean,accuracy," << format_double(report.mean_accuracy) << '\n';
    if (report.mean_roc_auc) csv << "mean,roc_auc," << format_double(*report.mean_roc_auc) << '\n';
    csv << "mean,kappa," << format_double(report.mean_kappa) << '\n';
    for (LabelIndex t = 0; t < report.confusion.n_labels(); ++t) {
      for (LabelIndex p = 0; p < report.confusion.n_labels(); ++p) {
        csv << "total,confusion:" << names[t] << ':' << names[p] << ','
            << report.confusion.at(t, p) << '\n';
      }
    }
  } else {
    require(config.model_path, "--model (or --folds for cross-validation)");
    require(config.data.path, "--data");
    const ModelFile model = parse_model_file(read_file(config.model_path));
    auto in = open_input(config.data.path);
    const auto data = load_csv_with_schema(in, model.schema.attributes, model.schema.label_name,
                                           model.schema.label_names);
    const auto m = score_predictions(data.labels(), predict_rows(model.model, data),
                                     data.n_labels());
    std::printf("%8s  %8s  %8s  %8s\n", "n", "accuracy", "roc_auc", "kappa");
    std::printf("%8zu  %8.4f  %8s  %8.4f\n\n", m.n, m.accuracy,
                m.roc_auc ? fixed(*m.roc_auc).c_str() : "-", m.kappa);
    std::cout << confusion_text(m.confusion, data.label_names());
    metric_records(csv, "all", m, data.label_names());
  }
  const auto out = or_default(config.out_path, "metrics.csv");
  write_file_atomic(out, csv.str());
  std::cout << "metrics -> " << out << '\n';
  return kExitOk;
}

int cmd_render(const RunConfig& config) {
  require(config.model_path, "--model");
  const ModelFile model = parse_model_file(read_file(config.model_path));
  const auto text = render_rule_list(model.model, model.schema);
  if (config.out_path.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(config.out_path, text);
  }
  return kExitOk;
}

int cmd_benchmark(const RunConfig& config) {
  const auto rows = run_benchmark(config);
  const auto out = or_default(config.out_path, "bench.csv");
  write_file_atomic(out, benchmark_csv(rows));
  std::cout << benchmark_summary(rows) << "runtimes -> " << out << '\n';
  return kExitOk;
}

namespace {

void add_common(CLI::App* sub, RunConfig& c, std::string& config_path) {
  sub->add_option("--config", config_path, "key=value file with option defaults; flags win");
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads (0: all cores)")->capture_default_str();
}

void add_data(CLI::App* sub, RunConfig& c) {
  sub->add_option("--data", c.data.path, "Input CSV");
  sub->add_option("--label", c.data.label, "Label column");
  sub->add_option("--bins", c.data.bins, "Quantize a numeric column: <column>:<2|3>")
      ->take_all();
  sub->add_flag("--missing-as-category", c.data.missing_as_category,
                "Treat empty cells as a category of their own");
}

void add_miner(CLI::App* sub, RunConfig& c) {
  sub->add_option("--algo", c.algo, "mca or apriori")->capture_default_str();
  sub->add_option("--r-max", c.miner.r_max, "Maximum rule length")->capture_default_str();
  sub->add_option("--s-min", c.miner.s_min, "Minimum class support")->capture_default_str();
  sub->add_option("--mu-min", c.miner.mu_min, "Minimum MCA score")->capture_default_str();
  sub->add_option("--top", c.miner.top_m, "Rules kept per label")->capture_default_str();
  sub->add_option("--components", c.components, "MCA components used for scores (0: all)")
      ->capture_default_str();
  sub->add_option("--time-budget", c.apriori_budget_seconds, "Apriori time budget in seconds");
}

void add_brl(CLI::App* sub, RunConfig& c) {
  sub->add_option("--chains", c.brl.n_chains, "Markov chains")->capture_default_str();
  sub->add_option("--lambda", c.brl.lambda, "Prior mean list length")->capture_default_str();
  sub->add_option("--eta", c.brl.eta_card, "Prior mean rule cardinality")->capture_default_str();
  sub->add_option("--alpha", c.brl.alpha, "Dirichlet pseudo-counts, one per label")
      ->delimiter(',');
  sub->add_option("--max-iters", c.brl.max_iters, "Iteration cap per chain")
      ->capture_default_str();
  sub->add_option("--check-interval", c.brl.check_interval, "Iterations between R-hat checks")
      ->capture_default_str();
  sub->add_option("--rhat", c.brl.rhat_threshold, "R-hat stop threshold")->capture_default_str();
  sub->add_option("--max-length", c.brl.max_list_length, "Rule list length cap (0: none)")
      ->capture_default_str();
  sub->add_option("--thin", c.brl.thin, "Keep every n-th state")->capture_default_str();
}

// Keys name long options without the dashes, optionally under a [subcommand]
// section. Keys meant for other subcommands are ignored so that one file can
// serve a whole pipeline.
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  for (const auto& item : CLI::ConfigINI().from_config(in)) {
    if (!item.parents.empty() && item.parents != std::vector<std::string>{sub->get_name()}) continue;
    std::string name = item.name;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config" || name == "help") continue;
    auto* opt = sub->get_option_no_throw("--" + name);
    if (opt == nullptr || opt->count() > 0) continue;
    for (const auto& value : item.inputs) opt->add_result(value);
    opt->run_callback();
  }
}

}  // namespace

int run(int argc, char** argv) {
  RunConfig c;
  std::string config_path;
  CLI::App app{"Rule-list classifiers from MCA-mined rules and Bayesian rule lists", "mcabrl"};
  app.require_subcommand(1);

  auto* mine_cmd = app.add_subcommand("mine", "Mine candidate rules into rules.json");
  add_common(mine_cmd, c, config_path);
  add_data(mine_cmd, c);
  add_miner(mine_cmd, c);
  mine_cmd->add_option("--out", c.out_path, "Output rule file (default rules.json)");

  auto* train_cmd = app.add_subcommand("train", "Fit a rule list over mined rules");
  add_common(train_cmd, c, config_path);
  train_cmd->add_option("--data", c.data.path, "Training CSV");
  train_cmd->add_option("--rules", c.rules_path, "Rule file from `mine`");
  add_brl(train_cmd, c);
  train_cmd->add_option("--out", c.out_path, "Output model file (default model.json)");

  auto* predict_cmd = app.add_subcommand("predict", "Apply a model to a CSV");
  add_common(predict_cmd, c, config_path);
  predict_cmd->add_option("--model", c.model_path, "Model file from `train`");
  predict_cmd->add_option("--data", c.data.path, "Input CSV");
  predict_cmd->add_option("--out", c.out_path, "Output CSV (default predictions.csv)");

  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Score a model on labelled data, or cross-validate the whole pipeline");
  add_common(evaluate_cmd, c, config_path);
  add_data(evaluate_cmd, c);
  add_miner(evaluate_cmd, c);
  add_brl(evaluate_cmd, c);
  evaluate_cmd->add_option("--model", c.model_path, "Model file to score");
  evaluate_cmd->add_option("--folds", c.folds, "Cross-validation folds (instead of --model)");
  evaluate_cmd->add_option("--out", c.out_path, "Metrics records (default metrics.csv)");

  auto* render_cmd = app.add_subcommand("render", "Print a model as if / else if / else text");
  add_common(render_cmd, c, config_path);
  render_cmd->add_option("--model", c.model_path, "Model file");
  render_cmd->add_option("--out", c.out_path, "Output text file (default stdout)");

  auto* bench_cmd = app.add_subcommand("benchmark", "Time MCA-miner against Apriori (defaults here: r-max 3, s-min 0.1)");
  add_common(bench_cmd, c, config_path);
  add_miner(bench_cmd, c);
  bench_cmd->add_option("--attributes", c.bench.attributes, "Attribute-count grid")
      ->delimiter(',');
  bench_cmd->add_option("--rows", c.bench.rows, "Rows per dataset")->capture_default_str();
  bench_cmd->add_option("--categories", c.bench.categories, "Categories per attribute")
      ->capture_default_str();
  bench_cmd->add_option("--repetitions", c.bench.repetitions, "Datasets per grid point")
      ->capture_default_str();
  bench_cmd->add_option("--signal-fraction", c.bench.signal_fraction,
                        "Share of label-correlated attributes")
      ->capture_default_str();
  bench_cmd->add_option("--signal-strength", c.bench.signal_strength,
                        "Probability a signal cell follows the label")
      ->capture_default_str();
  bench_cmd->add_option("--budget", c.bench.budget_seconds, "Per-run Apriori budget in seconds")
      ->capture_default_str();
  bench_cmd->add_option("--out", c.out_path, "Runtime CSV (default bench.csv)");

  // The scaling benchmark needs deeper rules and a lower floor than the
  // classification defaults before frequency counting becomes the bottleneck.
  bench_cmd->preparse_callback([&c](std::size_t) {
    c.miner.r_max = 3;
    c.miner.s_min = 0.1;
  });

  try {
    app.parse(argc, argv);
    if (!config_path.empty()) apply_config_file(app.get_subcommands().front(), config_path);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  for (const auto* sub : app.get_subcommands()) c.subcommand = sub->get_name();

  try {
    c.validate();
    if (c.subcommand == "mine") return cmd_mine(c);
    if (c.subcommand == "train") return cmd_train(c);
    if (c.subcommand == "predict") return cmd_predict(c);
    if (c.subcommand == "evaluate") return cmd_evaluate(c);
    if (c.subcommand == "render") return cmd_render(c);
    if (c.subcommand == "benchmark") return cmd_benchmark(c);
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace mcabrl::cli
