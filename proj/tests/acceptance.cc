// End-to-end acceptance run: one PASS / FAIL / SKIP line per criterion.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "cli/benchmark.h"
#include "cli/pipeline.h"
#include "mcabrl/brl.h"
#include "mcabrl/mca.h"
#include "mcabrl/metrics.h"
#include "mcabrl/miner.h"
#include "oracles.h"
#include "test_support.h"

namespace mcabrl {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const std::string kData = MCABRL_DATA_DIR;

struct Outcome {
  enum Kind { kPass, kFail, kSkip } kind;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Outcome::kPass : Outcome::kFail, std::move(detail)};
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

cli::RunConfig titanic_config() {
  cli::RunConfig c;
  c.data.path = kData + "/titanic.csv";
  c.data.label = "survived";
  return c;
}

cli::RunConfig heart_config() {
  cli::RunConfig c;
  c.data.path = kData + "/heart_disease.csv";
  c.data.label = "diameter narrowing";
  c.data.bins = {"age:3", "rest SBP:3", "cholesterol:3", "max HR:3", "ST by exercise:3"};
  c.data.missing_as_category = true;
  return c;
}

// 1. Five-fold cross-validation at the published settings.
Outcome table_reproduction() {
  std::string detail;
  bool ok = true;
  struct Target {
    const char* name;
    cli::RunConfig config;
    double acc, acc_tol, auc, auc_tol;
  };
  for (auto t : {Target{"titanic", titanic_config(), 0.79, 0.03, 0.75, 0.05},
                 Target{"heart", heart_config(), 0.82, 0.05, 0.86, 0.05}}) {
    t.config.folds = 5;
    t.config.seed = 0;
    const auto report = cli::cross_validate(cli::load_dataset(t.config.data), t.config);
    const double auc = report.mean_roc_auc.value_or(NAN);
    const bool here = std::abs(report.mean_accuracy - t.acc) <= t.acc_tol &&
                      std::abs(auc - t.auc) <= t.auc_tol;
    ok = ok && here;
    detail += fmt("%s accuracy %.4f (target %.2f±%.2f) auc %.4f (target %.2f±%.2f); ", t.name,
                  report.mean_accuracy, t.acc, t.acc_tol, auc, t.auc, t.auc_tol);
  }
  return verdict(ok, detail);
}

// 2. mine() against exhaustive enumeration.
Outcome miner_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2);
  int instances = 0, mismatches = 0;
  std::string first_mismatch;
  while (instances < 40) {
    const std::size_t p = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
    std::vector<std::size_t> cats;
    std::size_t literals = 0;
    for (std::size_t a = 0; a < p; ++a) {
      cats.push_back(std::uniform_int_distribution<std::size_t>(2, 3)(rng));
      literals += cats.back();
    }
    if (literals > 12) continue;
    const std::size_t labels = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
    const auto d = testing_support::random_dataset(
        std::uniform_int_distribution<std::size_t>(15, 60)(rng), cats, labels, rng());
    const ScoreTable scores(d, fit_mca(d, {.max_components = instances % 2 ? 2u : 0u}));
    MinerConfig c;
    c.r_max = std::uniform_int_distribution<int>(1, 3)(rng);
    c.s_min = std::uniform_int_distribution<int>(1, 3)(rng) / 10.0;
    c.mu_min = std::uniform_int_distribution<int>(0, 4)(rng) / 10.0;
    c.top_m = std::uniform_int_distribution<int>(1, 10)(rng);
    const auto got = mine(d, scores, c);
    const auto want = oracles::mine(d, scores, c.r_max, c.s_min, c.mu_min, c.top_m);
    for (LabelIndex k = 0; k < labels; ++k) {
      const auto diff = oracles::mined_difference(got.per_label[k], want[k], 1e-10);
      if (!diff.empty()) {
        ++mismatches;
        if (first_mismatch.empty()) first_mismatch = diff;
      }
    }
    ++instances;
  }
  const double elapsed = seconds_since(start);
  return verdict(mismatches == 0 && elapsed < 10.0,
                 fmt("%d instances, %d mismatching label lists%s%s, %.2f s", instances, mismatches,
                     first_mismatch.empty() ? "" : ", first: ", first_mismatch.c_str(), elapsed));
}

// 3. MCA against a brute-force eigen-decomposition.
Outcome mca_oracle() {
  std::mt19937_64 rng(3);
  int instances = 0;
  double worst_coords = 0, worst_cosine = 0;
  bool shapes_ok = true;
  while (instances < 40) {
    const std::size_t p = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::vector<std::size_t> cats;
    std::size_t j = 0;
    for (std::size_t a = 0; a < p; ++a) {
      cats.push_back(std::uniform_int_distribution<std::size_t>(2, 3)(rng));
      j += cats.back();
    }
    const std::size_t labels = std::uniform_int_distribution<std::size_t>(2, 3)(rng);
    if (j + labels > 15) continue;
    const auto d = testing_support::random_dataset(
        std::uniform_int_distribution<std::size_t>(6, 20)(rng), cats, labels, rng());
    const auto want = oracles::correspondence_analysis(d);
    const auto model = fit_mca(d, {.max_components = 0});
    shapes_ok = shapes_ok && model.owners() == want.owners;
    worst_coords = std::max(worst_coords,
                            oracles::coords_deviation(model.category_coords(),
                                                      model.singular_values(), want.coords,
                                                      want.sigma));
    for (const auto& lit : d.literals()) {
      for (LabelIndex k = 0; k < d.n_labels(); ++k) {
        const auto lc = model.literal_column(lit);
        const auto kc = model.label_column(k);
        if (!lc || !kc) continue;
        const Eigen::VectorXd v = want.coords.row(static_cast<Eigen::Index>(*lc));
        const Eigen::VectorXd w = want.coords.row(static_cast<Eigen::Index>(*kc));
        if (v.norm() < 1e-9 || w.norm() < 1e-9) continue;
        worst_cosine = std::max(
            worst_cosine, std::abs(literal_label_score(model, lit, k) - oracles::cosine(v, w)));
      }
    }
    ++instances;
  }
  return verdict(shapes_ok && worst_coords <= 1e-8 && worst_cosine <= 1e-8,
                 fmt("%d instances, max coordinate deviation %.2e, max cosine deviation %.2e",
                     instances, worst_coords, worst_cosine));
}

// 4. Sampler frequencies against the enumerated posterior.
Outcome brl_posterior() {
  const auto start = Clock::now();
  double worst = 0;
  std::string detail;
  std::mt19937_64 rng(4);
  for (int instance = 0; instance < 3; ++instance) {
    const auto d = testing_support::random_dataset(60, {2, 3, 2, 3}, 2, rng());
    // seven distinct rules of one and two literals: 1 + 7 + 42 = 50 lists
    std::vector<Rule> rules;
    const auto lits = d.literals();
    while (rules.size() < 7) {
      const auto& a = lits[std::uniform_int_distribution<std::size_t>(0, lits.size() - 1)(rng)];
      const auto& b = lits[std::uniform_int_distribution<std::size_t>(0, lits.size() - 1)(rng)];
      Rule r = rules.size() % 2 || a.attribute == b.attribute ? Rule({a}) : Rule({a, b});
      if (std::find(rules.begin(), rules.end(), r) == rules.end()) rules.push_back(std::move(r));
    }
    BrlConfig c;
    c.max_list_length = 2;
    const BrlProblem problem(d, rules, c);
    const auto states = oracles::all_lists(rules.size(), 2);
    const auto exact = oracles::posterior(states, rules, d, problem.alpha(), c.lambda, c.eta_card, 2);
    Chain chain(problem, 100 + static_cast<std::uint64_t>(instance), 1);
    const std::size_t iters = 50000;
    chain.advance(iters);
    std::map<ListState, double> freq;
    for (const auto& s : chain.trace().samples) freq[s.state] += 1.0 / iters;
    double tv = 0;
    for (std::size_t i = 0; i < states.size(); ++i) tv += std::abs(freq[states[i]] - exact[i]);
    tv /= 2;
    worst = std::max(worst, tv);
    detail += fmt("TV %.4f over %zu states; ", tv, states.size());
  }
  const double elapsed = seconds_since(start);
  return verdict(worst < 0.05 && elapsed < 60.0, detail + fmt("%.2f s", elapsed));
}

// 5. R-hat stop on Titanic with four chains.
Outcome convergence_stop() {
  auto config = titanic_config();
  const auto data = cli::load_dataset(config.data);
  const auto rules = cli::candidate_rules(cli::mine_rules(data, config).rules);
  int stopped = 0;
  std::string detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    BrlConfig c;
    c.n_chains = 4;
    c.max_iters = 200000;
    c.seed = seed;
    const auto result = train(data, rules, c);
    const auto& d = result.diagnostics;
    const bool ok = d.converged && d.final_rhat <= 1.05 && d.iterations < c.max_iters;
    stopped += ok;
    detail += fmt("seed %llu: R-hat %.4f after %zu; ", static_cast<unsigned long long>(seed),
                  d.final_rhat, d.iterations);
  }
  return verdict(stopped >= 4, fmt("%d of 5 stopped early; ", stopped) + detail);
}

// 6. Concurrent chains against sequential ones.
Outcome parallel_speedup() {
  const unsigned cores = std::thread::hardware_concurrency();
  if (cores < 4) return {Outcome::kSkip, fmt("%u hardware threads available, need >= 4", cores)};
  auto config = titanic_config();
  config.miner.s_min = 0.05;
  config.miner.r_max = 3;
  config.miner.mu_min = 0.1;
  const auto data = cli::load_dataset(config.data);
  const auto rules = cli::candidate_rules(cli::mine_rules(data, config).rules);
  BrlConfig c;
  c.n_chains = 6;
  c.max_iters = 20000;
  c.check_interval = c.max_iters;  // fixed amount of work
  auto timed = [&](unsigned threads) {
    c.threads = threads;
    const auto start = Clock::now();
    train(data, rules, c);
    return seconds_since(start);
  };
  const double sequential = timed(1);
  const double concurrent = timed(6);
  const double ratio = concurrent / sequential;
  return verdict(ratio <= 0.7, fmt("%zu rules, sequential %.2f s, concurrent %.2f s, ratio %.2f",
                                   rules.size(), sequential, concurrent, ratio));
}

// 7. Scaling benchmark.
Outcome scaling_benchmark() {
  cli::RunConfig c;
  c.miner.r_max = 3;
  c.miner.s_min = 0.1;
  const auto rows = cli::run_benchmark(c);
  std::map<std::pair<std::size_t, std::string>, std::vector<double>> times;
  bool mca_complete = true;
  for (const auto& r : rows) {
    times[{r.attributes, r.miner}].push_back(r.seconds);
    if (r.miner == "mca_miner" && r.attributes == 100) {
      mca_complete = mca_complete && r.status != MineStatus::kBudgetExceeded;
    }
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  std::string detail;
  for (const std::size_t p : c.bench.attributes) {
    detail += fmt("%zu attributes: mca %.4f s, apriori %.4f s; ", p, median(times[{p, "mca_miner"}]),
                  median(times[{p, "apriori"}]));
  }
  const double mca = median(times[{100, "mca_miner"}]);
  const double apriori = median(times[{100, "apriori"}]);
  return verdict(mca_complete && mca < 300.0 && mca < apriori, detail);
}

// 8. Metric examples and oracles.
Outcome metric_properties() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* what) {
    if (!ok) failed.push_back(what);
  };
  const std::vector<LabelIndex> y{0, 1, 1, 0};
  check(accuracy(y, y) == 1.0, "all correct");
  check(accuracy(y, std::vector<LabelIndex>{0, 1, 0, 0}) == 0.75, "3 of 4");
  const std::vector<LabelIndex> yb{0, 0, 1, 1};
  check(roc_auc(yb, std::vector<double>{0.1, 0.2, 0.8, 0.9}) == 1.0, "separating scores");
  check(roc_auc(yb, std::vector<double>{0.3, 0.3, 0.3, 0.3}) == 0.5, "all ties");
  check(cohen_kappa(ConfusionMatrix::from_counts({{7, 0}, {0, 3}})) == 1.0, "diagonal");
  check(cohen_kappa(ConfusionMatrix::from_counts({{1, 1}, {1, 1}})) == 0.0, "uniform");

  std::mt19937_64 rng(8);
  double worst_auc = 0, worst_kappa = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 50;
    std::vector<LabelIndex> labels(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = i < 2 ? static_cast<LabelIndex>(i)
                        : std::uniform_int_distribution<LabelIndex>(0, 1)(rng);
      s[i] = std::uniform_int_distribution<int>(0, 9)(rng) / 9.0;
    }
    worst_auc = std::max(worst_auc, std::abs(roc_auc(labels, s) - oracles::trapezoid_auc(labels, s)));
    const std::size_t l = 2 + trial % 3;
    std::vector<std::vector<std::size_t>> counts(l, std::vector<std::size_t>(l));
    std::vector<std::vector<double>> as_double(l, std::vector<double>(l));
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = 0; j < l; ++j) {
        counts[i][j] = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
        as_double[i][j] = static_cast<double>(counts[i][j]);
      }
    }
    worst_kappa = std::max(worst_kappa, std::abs(cohen_kappa(ConfusionMatrix::from_counts(counts)) -
                                                 oracles::kappa(as_double)));
  }
  check(worst_auc < 1e-12, "auc oracle");
  check(worst_kappa < 1e-12, "kappa oracle");
  std::string detail = fmt("6 examples, oracle deviation auc %.1e kappa %.1e", worst_auc, worst_kappa);
  for (const auto& f : failed) detail += "; failed: " + f;
  return verdict(failed.empty(), detail);
}

// 9. Rerunning the CLI pipeline gives identical files.
int run_in(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" + MCABRL_CLI_PATH + "' " + args +
                          " >>log.txt 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// bench.csv without its wall-time column
std::string without_timings(const std::string& csv) {
  std::istringstream in(csv);
  std::string out, line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::istringstream fields(line);
    for (std::string x; std::getline(fields, x, ',');) f.push_back(x);
    if (f.size() > 3) f.erase(f.begin() + 3);
    for (const auto& x : f) out += x + ",";
    out += "\n";
  }
  return out;
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() /
                    ("mcabrl_acceptance_" + std::to_string(std::random_device{}()));
  const std::string titanic = " --data '" + kData + "/titanic.csv'";
  const std::vector<std::string> steps{
      "mine" + titanic + " --label survived --out rules.json",
      "train" + titanic + " --rules rules.json --seed 3 --out model.json",
      "predict" + titanic + " --model model.json --out predictions.csv",
      "evaluate" + titanic + " --model model.json --out metrics.csv",
      "evaluate" + titanic + " --label survived --folds 5 --seed 3 --out cv.csv",
      "render --model model.json --out model.txt",
      "mine" + titanic + " --label survived --algo apriori --out apriori.json",
      "benchmark --attributes 5,10 --repetitions 2 --out bench.csv"};
  const std::vector<std::string> files{"rules.json",  "model.json", "predictions.csv",
                                       "metrics.csv", "cv.csv",     "model.txt",
                                       "apriori.json"};
  std::vector<fs::path> runs{root / "a", root / "b"};
  for (std::size_t r = 0; r < runs.size(); ++r) {
    fs::create_directories(runs[r]);
    for (const auto& step : steps) {
      // the second run uses a different thread count
      const int code = run_in(runs[r], step + (r == 0 ? " --threads 1" : " --threads 4"));
      if (code != 0) {
        fs::remove_all(root);
        return verdict(false, "step failed with exit " + std::to_string(code) + ": " + step);
      }
    }
  }
  std::vector<std::string> differing;
  for (const auto& f : files) {
    if (slurp(runs[0] / f) != slurp(runs[1] / f)) differing.push_back(f);
  }
  if (without_timings(slurp(runs[0] / "bench.csv")) != without_timings(slurp(runs[1] / "bench.csv"))) {
    differing.push_back("bench.csv");
  }
  fs::remove_all(root);
  std::string detail = fmt("%zu artifacts compared across two runs (threads 1 vs 4); "
                           "bench.csv compared without its wall-time column",
                           files.size() + 1);
  for (const auto& f : differing) detail += "; differs: " + f;
  return verdict(differing.empty(), detail);
}

}  // namespace
}  // namespace mcabrl

int main() {
  using mcabrl::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"table reproduction", mcabrl::table_reproduction},
      {"miner oracle", mcabrl::miner_oracle},
      {"mca oracle", mcabrl::mca_oracle},
      {"brl posterior", mcabrl::brl_posterior},
      {"convergence stop", mcabrl::convergence_stop},
      {"parallel speedup", mcabrl::parallel_speedup},
      {"scaling benchmark", mcabrl::scaling_benchmark},
      {"metric properties", mcabrl::metric_properties},
      {"determinism", mcabrl::determinism}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.kind == Outcome::kPass ? "PASS" : o.kind == Outcome::kFail ? "FAIL" : "SKIP";
    failures += o.kind == Outcome::kFail;
    std::printf("criterion %zu (%s): %s - %s\n", i + 1, criteria[i].first, tag, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
