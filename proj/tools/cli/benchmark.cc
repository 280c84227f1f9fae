#include "cli/benchmark.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>

#include "cli/pipeline.h"
#include "cli/synthetic.h"
#include "mcabrl/apriori.h"
#include "mcabrl/mca.h"
#include "mcabrl/miner.h"

namespace mcabrl::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const RunConfig& config) {
  const auto& grid = config.bench;
  std::vector<BenchmarkRow> rows;
  for (const std::size_t p : grid.attributes) {
    for (int rep = 0; rep < grid.repetitions; ++rep) {
      SyntheticSpec params;
      params.rows = grid.rows;
      params.attributes = p;
      params.categories = grid.categories;
      params.signal_fraction = grid.signal_fraction;
      params.signal_strength = grid.signal_strength;
      params.seed = config.seed + 7919 * static_cast<std::uint64_t>(rep) + p;
      const auto data = make_synthetic(params);

      {
        McaOptions mo;
        mo.max_components = config.components;
        MinerConfig mc = config.miner;
        mc.threads = config.threads;
        const auto start = Clock::now();
        const auto model = fit_mca(data, mo);
        const auto result = mine(data, model, mc);
        rows.push_back({p, rep, "mca_miner", seconds_since(start), result.status,
                        result.rules.size()});
      }
      {
        AprioriConfig ac;
        ac.s_min = config.miner.s_min;
        ac.r_max = config.miner.r_max;
        ac.time_budget_seconds = grid.budget_seconds;
        const auto start = Clock::now();
        const auto result = apriori_mine(data, ac);
        rows.push_back({p, rep, "apriori", seconds_since(start), result.status,
                        result.rules.size()});
      }
    }
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << "attributes,repetition,miner,seconds,status,rules\n";
  for (const auto& r : rows) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.6f", r.seconds);
    out << r.attributes << ',' << r.repetition << ',' << r.miner << ',' << secs << ','
        << to_string(r.status) << ',' << r.rules << '\n';
  }
  return out.str();
}

std::string benchmark_summary(const std::vector<BenchmarkRow>& rows) {
  std::map<std::size_t, std::map<std::string, std::vector<double>>> times;
  std::map<std::size_t, std::map<std::string, bool>> over_budget;
  for (const auto& r : rows) {
    times[r.attributes][r.miner].push_back(r.seconds);
    if (r.status == MineStatus::kBudgetExceeded) over_budget[r.attributes][r.miner] = true;
  }
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%10s  %14s  %14s  %10s\n", "attributes", "mca_miner [s]",
                "apriori [s]", "ratio");
  out << line;
  for (const auto& [p, by_miner] : times) {
    const auto mca = by_miner.find("mca_miner");
    const auto apr = by_miner.find("apriori");
    if (mca == by_miner.end() || apr == by_miner.end()) continue;
    const double m = median(mca->second);
    const double a = median(apr->second);
    const bool budget = over_budget[p]["apriori"];
    char apriori_text[32];
    std::snprintf(apriori_text, sizeof apriori_text, budget ? ">%.4f" : "%.4f", a);
    std::snprintf(line, sizeof line, "%10zu  %14.4f  %14s  %9.1fx\n", p, m, apriori_text,
                  m > 0.0 ? a / m : 0.0);
    out << line;
  }
  return out.str();
}

}  // namespace mcabrl::cli
