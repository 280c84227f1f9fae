#include "mcabrl/brl.h"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace mcabrl {

namespace {

double log_poisson(std::size_t x, double mean) {
  const auto xd = static_cast<double>(x);
  return xd * std::log(mean) - mean - std::lgamma(xd + 1.0);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (const double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

std::size_t uniform_index(std::size_t n, std::mt19937_64& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

void BrlConfig::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(eta_card > 0.0)) throw std::invalid_argument("eta must be > 0");
  for (const double a : alpha) {
    if (!(a > 0.0)) throw std::invalid_argument("alpha entries must be > 0");
  }
  if (n_chains < 1) throw std::invalid_argument("need at least one chain");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (check_interval < 1) throw std::invalid_argument("check_interval must be >= 1");
  if (!(rhat_threshold > 1.0)) throw std::invalid_argument("rhat threshold must be > 1");
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
}

CountMatrix capture_counts(std::span<const Rule> rules, const CategoricalDataset& dataset) {
  CountMatrix counts(rules.size() + 1, std::vector<std::size_t>(dataset.n_labels(), 0));
  for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
    const auto row = dataset.row(i);
    std::size_t clause = 0;
    while (clause < rules.size() && !rules[clause].matches(row)) ++clause;
    ++counts[clause][dataset.label(i)];
  }
  return counts;
}

// ---------------------------------------------------------------------------
// BrlProblem

BrlProblem::BrlProblem(const CategoricalDataset& dataset, std::vector<Rule> rules,
                       const BrlConfig& config)
    : n_rows_(dataset.n_rows()),
      n_labels_(dataset.n_labels()),
      rules_(std::move(rules)),
      lambda_(config.lambda),
      eta_(config.eta_card) {
  config.validate();
  {
    std::vector<Rule> sorted(rules_);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("mined rule set contains duplicates");
    }
  }
  if (!config.alpha.empty() && config.alpha.size() != n_labels_) {
    throw std::invalid_argument("alpha needs one entry per label (" + std::to_string(n_labels_) +
                                ")");
  }
  alpha_ = config.alpha.empty() ? std::vector<double>(n_labels_, 1.0) : config.alpha;

  const RowIndex index(dataset);
  for (LabelIndex k = 0; k < n_labels_; ++k) label_rows_.push_back(index.label(k));
  std::size_t max_card = 0;
  for (const auto& r : rules_) {
    for (const auto& l : r.literals()) {
      if (l.attribute >= dataset.n_attributes() ||
          l.category >= dataset.schema(l.attribute).categories.size()) {
        throw std::invalid_argument("rule literal outside the dataset schema");
      }
    }
    rule_rows_.push_back(index.rule_rows(r));
    cardinality_.push_back(r.size());
    max_card = std::max(max_card, r.size());
  }
  rules_per_cardinality_.assign(max_card + 1, 0);
  for (const auto c : cardinality_) ++rules_per_cardinality_[c];

  max_length_ = rules_.size();
  if (config.max_list_length > 0) max_length_ = std::min(max_length_, config.max_list_length);
  std::vector<double> length_terms;
  for (std::size_t m = 0; m <= max_length_; ++m) length_terms.push_back(log_poisson(m, lambda_));
  log_length_normalizer_ = log_sum_exp(length_terms);

  lgamma_label_.resize(n_labels_);
  for (std::size_t k = 0; k < n_labels_; ++k) {
    lgamma_label_[k].resize(n_rows_ + 1);
    for (std::size_t c = 0; c <= n_rows_; ++c) {
      lgamma_label_[k][c] = std::lgamma(static_cast<double>(c) + alpha_[k]);
    }
  }
  const double alpha_sum = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
  lgamma_total_.resize(n_rows_ + 1);
  for (std::size_t c = 0; c <= n_rows_; ++c) {
    lgamma_total_[c] = std::lgamma(static_cast<double>(c) + alpha_sum);
  }
  log_beta_alpha_ = -std::lgamma(alpha_sum);
  for (const double a : alpha_) log_beta_alpha_ += std::lgamma(a);
}

std::optional<std::uint32_t> BrlProblem::rule_id(const Rule& rule) const {
  const auto it = std::find(rules_.begin(), rules_.end(), rule);
  if (it == rules_.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - rules_.begin());
}

ListState BrlProblem::to_state(std::span<const Rule> list) const {
  ListState state;
  for (const auto& r : list) {
    const auto id = rule_id(r);
    if (!id) throw std::invalid_argument("rule is not in the mined rule set");
    state.push_back(*id);
  }
  return state;
}

CountMatrix BrlProblem::capture_counts(const ListState& state) const {
  CountMatrix counts(state.size() + 1, std::vector<std::size_t>(n_labels_, 0));
  RowBits remaining(n_rows_, true);
  for (std::size_t j = 0; j < state.size(); ++j) {
    const RowBits captured = remaining & rule_rows_[state[j]];
    for (std::size_t k = 0; k < n_labels_; ++k) counts[j][k] = captured.count_and(label_rows_[k]);
    remaining.and_not(rule_rows_[state[j]]);
  }
  for (std::size_t k = 0; k < n_labels_; ++k) {
    counts[state.size()][k] = remaining.count_and(label_rows_[k]);
  }
  return counts;
}

double BrlProblem::log_beta_term(const std::vector<std::size_t>& counts) const {
  std::size_t total = 0;
  double value = 0.0;
  for (std::size_t k = 0; k < n_labels_; ++k) {
    value += lgamma_label_[k][counts[k]];
    total += counts[k];
  }
  return value - lgamma_total_[total] - log_beta_alpha_;
}

double BrlProblem::log_likelihood(const ListState& state) const {
  double value = 0.0;
  for (const auto& row : capture_counts(state)) value += log_beta_term(row);
  return value;
}

double BrlProblem::log_prior(const ListState& state) const {
  if (state.size() > max_length_) return -std::numeric_limits<double>::infinity();
  double value = log_poisson(state.size(), lambda_) - log_length_normalizer_;
  std::vector<std::size_t> available(rules_per_cardinality_);
  std::vector<double> terms;
  for (const auto id : state) {
    terms.clear();
    for (std::size_t c = 0; c < available.size(); ++c) {
      if (available[c] > 0) terms.push_back(log_poisson(c, eta_));
    }
    const std::size_t c = cardinality_.at(id);
    value += log_poisson(c, eta_) - log_sum_exp(terms);
    value -= std::log(static_cast<double>(available[c]));
    --available[c];
  }
  return value;
}

ListState BrlProblem::sample_prior(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const std::vector<double>& log_weights) {
    const double norm = log_sum_exp(log_weights);
    double u = unit(rng);
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
      u -= std::exp(log_weights[i] - norm);
      if (u <= 0.0) return i;
    }
    return log_weights.size() - 1;
  };

  std::vector<double> weights;
  for (std::size_t m = 0; m <= max_length_; ++m) weights.push_back(log_poisson(m, lambda_));
  const std::size_t length = draw(weights);

  std::vector<bool> used(rules_.size(), false);
  std::vector<std::size_t> available(rules_per_cardinality_);
  ListState state;
  for (std::size_t j = 0; j < length; ++j) {
    std::vector<std::size_t> cards;
    weights.clear();
    for (std::size_t c = 0; c < available.size(); ++c) {
      if (available[c] == 0) continue;
      cards.push_back(c);
      weights.push_back(log_poisson(c, eta_));
    }
    const std::size_t card = cards[draw(weights)];
    std::size_t pick = uniform_index(available[card], rng);
    for (std::uint32_t id = 0; id < rules_.size(); ++id) {
      if (used[id] || cardinality_[id] != card) continue;
      if (pick-- == 0) {
        used[id] = true;
        state.push_back(id);
        break;
      }
    }
    --available[card];
  }
  return state;
}

double log_posterior(std::span<const Rule> list, const BrlProblem& problem) {
  return problem.log_posterior(problem.to_state(list));
}

// ---------------------------------------------------------------------------
// Proposals

namespace {

std::size_t valid_move_count(std::size_t length, std::size_t max_length) {
  return (length < max_length ? 1 : 0) + (length >= 1 ? 1 : 0) + (length >= 2 ? 1 : 0);
}

}  // namespace

Proposal propose(const ListState& state, std::size_t n_rules, std::size_t max_length,
                 std::mt19937_64& rng) {
  max_length = std::min(max_length, n_rules);
  const std::size_t m = state.size();
  std::vector<MoveType> moves;
  if (m < max_length) moves.push_back(MoveType::kInsert);
  if (m >= 1) moves.push_back(MoveType::kRemove);
  if (m >= 2) moves.push_back(MoveType::kSwap);
  if (moves.empty()) throw std::logic_error("no valid proposal: empty list and no rules");

  Proposal p;
  p.move = moves[uniform_index(moves.size(), rng)];
  p.candidate = state;
  const double log_moves_here = std::log(static_cast<double>(moves.size()));

  switch (p.move) {
    case MoveType::kInsert: {
      std::vector<bool> used(n_rules, false);
      for (const auto id : state) used[id] = true;
      std::size_t pick = uniform_index(n_rules - m, rng);
      std::uint32_t rule = 0;
      for (std::uint32_t id = 0; id < n_rules; ++id) {
        if (!used[id] && pick-- == 0) {
          rule = id;
          break;
        }
      }
      const std::size_t pos = uniform_index(m + 1, rng);
      p.candidate.insert(p.candidate.begin() + static_cast<std::ptrdiff_t>(pos), rule);
      // forward: 1/V(s) * 1/(A-m) * 1/(m+1); reverse: 1/V(s') * 1/(m+1)
      p.log_proposal_ratio = log_moves_here -
                             std::log(static_cast<double>(valid_move_count(m + 1, max_length))) +
                             std::log(static_cast<double>(n_rules - m));
      break;
    }
    case MoveType::kRemove: {
      const std::size_t pos = uniform_index(m, rng);
      p.candidate.erase(p.candidate.begin() + static_cast<std::ptrdiff_t>(pos));
      // forward: 1/V(s) * 1/m; reverse: 1/V(s') * 1/(A-m+1) * 1/m
      p.log_proposal_ratio = log_moves_here -
                             std::log(static_cast<double>(valid_move_count(m - 1, max_length))) -
                             std::log(static_cast<double>(n_rules - m + 1));
      break;
    }
    case MoveType::kSwap: {
      const std::size_t i = uniform_index(m, rng);
      std::size_t j = uniform_index(m - 1, rng);
      if (j >= i) ++j;
      std::swap(p.candidate[i], p.candidate[j]);
      p.log_proposal_ratio = 0.0;
      break;
    }
    case MoveType::kIdentity:
      break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Chains

Chain::Chain(const BrlProblem& problem, std::uint64_t seed, std::size_t thin, Proposer proposer,
             std::optional<ListState> initial)
    : problem_(&problem), rng_(seed), thin_(std::max<std::size_t>(thin, 1)),
      proposer_(std::move(proposer)) {
  if (!proposer_) {
    const std::size_t n_rules = problem.n_rules();
    const std::size_t max_length = problem.max_length();
    proposer_ = [n_rules, max_length](const ListState& s, std::mt19937_64& rng) {
      return propose(s, n_rules, max_length, rng);
    };
  }
  state_ = initial ? std::move(*initial) : problem.sample_prior(rng_);
  current_ = problem.log_posterior(state_);
}

void Chain::advance(std::size_t iterations) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  trace_.log_posterior.reserve(trace_.log_posterior.size() + iterations);
  for (std::size_t step = 0; step < iterations; ++step) {
    Proposal p = proposer_(state_, rng_);
    const double candidate = problem_->log_posterior(p.candidate);
    const double log_accept = candidate - current_ + p.log_proposal_ratio;
    // log(1 - u) keeps the draw in (-inf, 0] and accepts log_accept >= 0 surely.
    if (log_accept >= 0.0 || std::log1p(-unit(rng_)) < log_accept) {
      state_ = std::move(p.candidate);
      current_ = candidate;
      ++trace_.accepted;
    }
    trace_.log_posterior.push_back(current_);
    const std::size_t iteration = trace_.log_posterior.size();
    if (iteration % thin_ == 0) trace_.samples.push_back({iteration, current_, state_});
  }
}

ChainTrace run_chain(const BrlProblem& problem, const BrlConfig& config, std::uint64_t chain_seed,
                     Proposer proposer) {
  Chain chain(problem, chain_seed, config.thin, std::move(proposer));
  chain.advance(config.max_iters);
  return chain.trace();
}

// ---------------------------------------------------------------------------
// Gelman-Rubin

double gelman_rubin(std::span<const std::vector<double>> traces) {
  if (traces.size() < 2) throw std::invalid_argument("R-hat needs at least two chains");
  const std::size_t length = traces.front().size();
  for (const auto& t : traces) {
    if (t.size() != length) throw std::invalid_argument("R-hat needs equal-length traces");
  }
  if (length < 4) throw std::invalid_argument("R-hat needs traces of length >= 4");

  const std::size_t start = length / 2;
  const auto n = static_cast<double>(length - start);
  const auto chains = static_cast<double>(traces.size());

  std::vector<double> means;
  double within = 0.0;
  for (const auto& t : traces) {
    double mean = 0.0;
    for (std::size_t i = start; i < length; ++i) mean += t[i];
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = start; i < length; ++i) ss += (t[i] - mean) * (t[i] - mean);
    within += ss / (n - 1.0);
    means.push_back(mean);
  }
  within /= chains;
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / chains;
  double between_over_n = 0.0;
  for (const double mu : means) between_over_n += (mu - grand) * (mu - grand);
  between_over_n /= chains - 1.0;

  if (within == 0.0) {
    return between_over_n == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return std::sqrt(((n - 1.0) / n * within + between_over_n) / within);
}

double gelman_rubin(std::span<const ChainTrace> traces) {
  std::vector<std::vector<double>> values;
  values.reserve(traces.size());
  for (const auto& t : traces) values.push_back(t.log_posterior);
  return gelman_rubin(values);
}

// ---------------------------------------------------------------------------
// Fitted lists

std::size_t FittedRuleList::clause_for(std::span<const CategoryIndex> row) const {
  std::size_t clause = 0;
  while (clause < rules.size() && !rules[clause].matches(row)) ++clause;
  return clause;
}

std::vector<double> FittedRuleList::clause_probabilities(std::size_t clause) const {
  const auto& n = counts.at(clause);
  std::vector<double> p(alpha.size());
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    p[k] = static_cast<double>(n[k]) + alpha[k];
    total += p[k];
  }
  for (auto& v : p) v /= total;
  return p;
}

std::vector<double> predict_proba(const FittedRuleList& list, std::span<const CategoryIndex> row) {
  return list.clause_probabilities(list.clause_for(row));
}

LabelIndex predict_label(const FittedRuleList& list, std::span<const CategoryIndex> row) {
  const auto p = predict_proba(list, row);
  return static_cast<LabelIndex>(std::max_element(p.begin(), p.end()) - p.begin());
}

// ---------------------------------------------------------------------------
// Training

TrainResult train(const BrlProblem& problem, const CategoricalDataset& dataset,
                  const BrlConfig& config) {
  config.validate();
  if (problem.n_rules() == 0) {
    TrainResult result;
    result.model.counts = capture_counts(std::vector<Rule>{}, dataset);
    result.model.alpha = problem.alpha();
    result.model.log_posterior = problem.log_posterior({});
    result.diagnostics.converged = true;
    return result;
  }

  const auto n_chains = static_cast<std::size_t>(config.n_chains);
  std::vector<Chain> chains;
  chains.reserve(n_chains);
  for (std::size_t c = 0; c < n_chains; ++c) {
    chains.emplace_back(problem, config.seed + c, config.thin);
  }

  TrainDiagnostics diag;
  diag.rhat_checked = n_chains >= 2;
  std::size_t done = 0;
  bool stop = false;
  std::exception_ptr failure;

  auto step_size = [&] { return std::min(config.check_interval, config.max_iters - done); };
  auto checkpoint = [&]() noexcept {
    done += step_size();
    if (failure) {
      stop = true;
      return;
    }
    if (diag.rhat_checked && done >= 4) {
      std::vector<std::vector<double>> traces;
      traces.reserve(n_chains);
      for (const auto& ch : chains) traces.push_back(ch.trace().log_posterior);
      const double rhat = gelman_rubin(traces);
      diag.rhat_history.emplace_back(done, rhat);
      diag.final_rhat = rhat;
      if (rhat <= config.rhat_threshold) {
        diag.converged = true;
        stop = true;
      }
    }
    if (done >= config.max_iters) stop = true;
  };

  std::size_t workers = config.threads != 0 ? config.threads
                                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n_chains);

  // Worker w owns chains w, w + workers, ...; all meet at the barrier, whose
  // completion step runs the convergence check.
  std::mutex failure_mutex;
  auto advance_owned = [&](std::size_t w) {
    for (std::size_t c = w; c < n_chains; c += workers) {
      try {
        chains[c].advance(step_size());
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers > 1) {
    std::barrier sync(static_cast<std::ptrdiff_t>(workers), checkpoint);
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        while (true) {
          advance_owned(w);
          sync.arrive_and_wait();
          if (stop) break;
        }
      });
    }
    pool.clear();
  } else {
    while (!stop) {
      advance_owned(0);
      checkpoint();
    }
  }
  if (failure) std::rethrow_exception(failure);
  diag.iterations = done;

  std::size_t accepted = 0;
  for (const auto& ch : chains) accepted += ch.trace().accepted;
  diag.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(done * n_chains);

  // Highest posterior among thinned samples past burn-in; ties keep the first.
  const ListState* best = nullptr;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n_chains; ++c) {
    for (const auto& s : chains[c].trace().samples) {
      if (s.iteration <= done / 2) continue;
      if (best == nullptr || s.log_posterior > best_value) {
        best = &s.state;
        best_value = s.log_posterior;
        diag.best_chain = static_cast<int>(c);
        diag.best_iteration = s.iteration;
      }
    }
  }
  if (best == nullptr) {
    for (std::size_t c = 0; c < n_chains; ++c) {
      if (best == nullptr || chains[c].current_log_posterior() > best_value) {
        best = &chains[c].state();
        best_value = chains[c].current_log_posterior();
        diag.best_chain = static_cast<int>(c);
        diag.best_iteration = done;
      }
    }
  }

  TrainResult result;
  for (const auto id : *best) result.model.rules.push_back(problem.rules()[id]);
  result.model.counts = capture_counts(result.model.rules, dataset);
  result.model.alpha = problem.alpha();
  result.model.log_posterior = best_value;
  result.diagnostics = std::move(diag);
  return result;
}

TrainResult train(const CategoricalDataset& dataset, const std::vector<Rule>& mined_rules,
                  const BrlConfig& config) {
  const BrlProblem problem(dataset, mined_rules, config);
  return train(problem, dataset, config);
}

}  // namespace mcabrl
