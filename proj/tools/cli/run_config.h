#ifndef MCABRL_CLI_RUN_CONFIG_H_
#define MCABRL_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mcabrl/brl.h"
#include "mcabrl/miner.h"
#include "mcabrl/serialization.h"

namespace mcabrl::cli {

struct DataOptions {
  std::string path;
  std::string label;
  std::vector<std::string> bins;  // "column:count"
  bool missing_as_category = false;
};

struct BenchmarkGrid {
  std::vector<std::size_t> attributes{10, 50, 100};
  std::size_t rows = 500;
  std::size_t categories = 3;
  int repetitions = 3;
  double signal_fraction = 0.1;
  double signal_strength = 0.6;
  double budget_seconds = 300.0;
};

struct RunConfig {
  std::string subcommand;
  DataOptions data;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: all available cores

  std::string algo = "mca";
  std::size_t components = 2;
  MinerConfig miner;
  double apriori_budget_seconds = std::numeric_limits<double>::infinity();

  BrlConfig brl;
  int folds = 0;  // evaluate: > 0 runs k-fold cross-validation

  std::string rules_path;
  std::string model_path;
  std::string out_path;

  BenchmarkGrid bench;

  void validate() const;  // throws std::invalid_argument
};

// Effective settings of a subcommand, as stored in its artifacts.
ConfigRecord mining_record(const RunConfig& config);
ConfigRecord training_record(const RunConfig& config);

// Round-trip text for a double.
std::string format_double(double value);

}  // namespace mcabrl::cli

#endif  // MCABRL_CLI_RUN_CONFIG_H_
