#include "cli/run_config.h"

#include <cstdio>
#include <stdexcept>

namespace mcabrl::cli {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void RunConfig::validate() const {
  if (algo != "mca" && algo != "apriori") {
    throw std::invalid_argument("--algo must be 'mca' or 'apriori'");
  }
  miner.validate();
  brl.validate();
  if (folds == 1 || folds < 0) throw std::invalid_argument("--folds must be 0 or >= 2");
  if (bench.attributes.empty()) throw std::invalid_argument("benchmark attribute grid is empty");
  for (const auto a : bench.attributes) {
    if (a == 0) throw std::invalid_argument("benchmark attribute counts must be >= 1");
  }
  if (bench.rows < 2) throw std::invalid_argument("benchmark needs at least two rows");
  if (bench.categories < 2) throw std::invalid_argument("benchmark needs >= 2 categories");
  if (bench.repetitions < 1) throw std::invalid_argument("benchmark repetitions must be >= 1");
  if (bench.signal_fraction < 0.0 || bench.signal_fraction > 1.0 || bench.signal_strength < 0.0 ||
      bench.signal_strength > 1.0) {
    throw std::invalid_argument("signal fraction and strength must lie in [0, 1]");
  }
}

namespace {

void add_data(ConfigRecord& r, const RunConfig& c) {
  r.emplace_back("data", c.data.path);
  r.emplace_back("label", c.data.label);
  for (const auto& b : c.data.bins) r.emplace_back("bins", b);
  r.emplace_back("missing_as_category", c.data.missing_as_category ? "true" : "false");
  r.emplace_back("seed", std::to_string(c.seed));
}

}  // namespace

ConfigRecord mining_record(const RunConfig& c) {
  ConfigRecord r;
  add_data(r, c);
  r.emplace_back("algo", c.algo);
  r.emplace_back("r_max", std::to_string(c.miner.r_max));
  r.emplace_back("s_min", format_double(c.miner.s_min));
  if (c.algo == "mca") {
    r.emplace_back("mu_min", format_double(c.miner.mu_min));
    r.emplace_back("top", std::to_string(c.miner.top_m));
    r.emplace_back("components", std::to_string(c.components));
    r.emplace_back("signed_scores", c.miner.signed_scores ? "true" : "false");
  } else {
    r.emplace_back("time_budget", format_double(c.apriori_budget_seconds));
  }
  return r;
}

ConfigRecord training_record(const RunConfig& c) {
  ConfigRecord r;
  add_data(r, c);
  r.emplace_back("rules", c.rules_path);
  r.emplace_back("chains", std::to_string(c.brl.n_chains));
  r.emplace_back("lambda", format_double(c.brl.lambda));
  r.emplace_back("eta", format_double(c.brl.eta_card));
  std::string alpha;
  for (const double a : c.brl.alpha) alpha += (alpha.empty() ? "" : ",") + format_double(a);
  r.emplace_back("alpha", alpha);
  r.emplace_back("max_iters", std::to_string(c.brl.max_iters));
  r.emplace_back("check_interval", std::to_string(c.brl.check_interval));
  r.emplace_back("rhat", format_double(c.brl.rhat_threshold));
  r.emplace_back("max_length", std::to_string(c.brl.max_list_length));
  r.emplace_back("thin", std::to_string(c.brl.thin));
  return r;
}

}  // namespace mcabrl::cli
