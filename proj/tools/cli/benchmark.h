#ifndef MCABRL_CLI_BENCHMARK_H_
#define MCABRL_CLI_BENCHMARK_H_

#include <string>
#include <vector>

#include "cli/run_config.h"
#include "mcabrl/rule.h"

namespace mcabrl::cli {

struct BenchmarkRow {
  std::size_t attributes = 0;
  int repetition = 0;
  std::string miner;  // "mca_miner" or "apriori"
  double seconds = 0.0;
  MineStatus status = MineStatus::kOk;
  std::size_t rules = 0;
};

// For each grid point and repetition, generates a synthetic dataset and times
// both miners on it under the same r_max and s_min. Generation is not timed;
// the MCA-miner timing includes fitting the MCA.
std::vector<BenchmarkRow> run_benchmark(const RunConfig& config);

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);
// Median wall time per (attributes, miner), aligned text.
std::string benchmark_summary(const std::vector<BenchmarkRow>& rows);

}  // namespace mcabrl::cli

#endif  // MCABRL_CLI_BENCHMARK_H_
