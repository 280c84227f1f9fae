#ifndef MCABRL_BRL_H_
#define MCABRL_BRL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mcabrl/dataset.h"
#include "mcabrl/row_bits.h"
#include "mcabrl/rule.h"

namespace mcabrl {

struct BrlConfig {
  double lambda = 3.0;    // prior mean of the list length
  double eta_card = 1.0;  // prior mean of a rule's cardinality
  std::vector<double> alpha;  // Dirichlet pseudo-counts; empty means all ones
  int n_chains = 4;
  std::size_t max_iters = 50000;
  std::size_t check_interval = 1000;
  double rhat_threshold = 1.05;
  std::uint64_t seed = 0;
  std::size_t max_list_length = 0;  // 0: no cap beyond the number of rules
  std::size_t thin = 10;            // keep every thin-th state
  // Worker threads for the chains; 0 means one per chain, capped at the
  // hardware thread count. Results do not depend on it.
  unsigned threads = 0;

  void validate() const;  // throws std::invalid_argument
};

// A rule list state: indices into the mined rule set, in list order. The
// default clause is implicit.
using ListState = std::vector<std::uint32_t>;
// (m+1) x l label counts; the last row is the default clause.
using CountMatrix = std::vector<std::vector<std::size_t>>;

// Label counts captured by each clause under first-match semantics, by a
// plain row scan.
CountMatrix capture_counts(std::span<const Rule> rules, const CategoricalDataset& dataset);

// Dataset, mined rules and prior constants, with everything the sampler needs
// precomputed. Immutable and safe to share between chains.
class BrlProblem {
 public:
  // Duplicate rules are rejected. Throws std::invalid_argument.
  BrlProblem(const CategoricalDataset& dataset, std::vector<Rule> rules, const BrlConfig& config);

  std::size_t n_rules() const { return rules_.size(); }
  std::size_t n_labels() const { return n_labels_; }
  std::size_t n_rows() const { return n_rows_; }
  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<double>& alpha() const { return alpha_; }
  // Longest admissible list: min(cap, number of rules).
  std::size_t max_length() const { return max_length_; }

  std::optional<std::uint32_t> rule_id(const Rule& rule) const;
  ListState to_state(std::span<const Rule> list) const;  // throws if a rule is not mined

  CountMatrix capture_counts(const ListState& state) const;
  // sum_j log B(N_j + alpha) - log B(alpha)
  double log_likelihood(const ListState& state) const;
  // Truncated Poisson(lambda) on the length over 0..max_length(); for each
  // rule in order, truncated Poisson(eta) on its cardinality over the
  // cardinalities still available, then uniform over the unused rules of that
  // cardinality.
  double log_prior(const ListState& state) const;
  double log_posterior(const ListState& state) const {
    return log_prior(state) + log_likelihood(state);
  }

  // A draw from the prior.
  ListState sample_prior(std::mt19937_64& rng) const;

 private:
  double log_beta_term(const std::vector<std::size_t>& counts) const;

  std::size_t n_rows_;
  std::size_t n_labels_;
  std::vector<Rule> rules_;
  std::vector<RowBits> rule_rows_;
  std::vector<RowBits> label_rows_;
  std::vector<std::size_t> cardinality_;
  std::vector<std::size_t> rules_per_cardinality_;
  std::vector<double> alpha_;
  double lambda_;
  double eta_;
  std::size_t max_length_;
  double log_length_normalizer_;
  std::vector<std::vector<double>> lgamma_label_;  // [k][c] = lgamma(c + alpha_k)
  std::vector<double> lgamma_total_;               // [c] = lgamma(c + sum alpha)
  double log_beta_alpha_;
};

double log_posterior(std::span<const Rule> list, const BrlProblem& problem);

enum class MoveType { kInsert, kRemove, kSwap, kIdentity };

struct Proposal {
  ListState candidate;
  // log q(state | candidate) - log q(candidate | state)
  double log_proposal_ratio = 0.0;
  MoveType move = MoveType::kIdentity;
};

// One of insert (an unused rule at a uniform position), remove (a uniform
// position) or swap (a uniform pair of positions), the move type drawn
// uniformly among those valid for `state`. Throws std::logic_error when no
// move is valid.
Proposal propose(const ListState& state, std::size_t n_rules, std::size_t max_length,
                 std::mt19937_64& rng);

using Proposer = std::function<Proposal(const ListState&, std::mt19937_64&)>;

struct ChainSample {
  std::size_t iteration = 0;  // 1-based
  double log_posterior = 0.0;
  ListState state;
};

struct ChainTrace {
  std::vector<double> log_posterior;  // one entry per iteration
  std::vector<ChainSample> samples;   // every thin-th iteration
  std::size_t accepted = 0;

  std::size_t iterations() const { return log_posterior.size(); }
};

// Resumable Metropolis-Hastings chain over rule lists.
class Chain {
 public:
  // Starts from `initial`, or from a prior draw when absent.
  Chain(const BrlProblem& problem, std::uint64_t seed, std::size_t thin = 10,
        Proposer proposer = {}, std::optional<ListState> initial = std::nullopt);

  void advance(std::size_t iterations);

  const ChainTrace& trace() const { return trace_; }
  const ListState& state() const { return state_; }
  double current_log_posterior() const { return current_; }

 private:
  const BrlProblem* problem_;
  std::mt19937_64 rng_;
  std::size_t thin_;
  Proposer proposer_;
  ListState state_;
  double current_;
  ChainTrace trace_;
};

ChainTrace run_chain(const BrlProblem& problem, const BrlConfig& config, std::uint64_t chain_seed,
                     Proposer proposer = {});

// Potential scale reduction on the second half of each trace:
// sqrt(((n-1)/n W + B/n) / W). Returns 1 when every value is identical and
// +inf when only the within-chain variance vanishes. Needs at least two
// equal-length traces of length >= 4.
double gelman_rubin(std::span<const std::vector<double>> traces);
double gelman_rubin(std::span<const ChainTrace> traces);

struct FittedRuleList {
  std::vector<Rule> rules;
  CountMatrix counts;  // (rules.size() + 1) x n_labels
  std::vector<double> alpha;
  double log_posterior = 0.0;

  std::size_t n_labels() const { return alpha.size(); }
  // Index of the first clause whose rule fires; rules.size() for the default.
  std::size_t clause_for(std::span<const CategoryIndex> row) const;
  // (N_j + alpha) / sum(N_j + alpha) for the clause at `clause`.
  std::vector<double> clause_probabilities(std::size_t clause) const;
};

std::vector<double> predict_proba(const FittedRuleList& list, std::span<const CategoryIndex> row);
LabelIndex predict_label(const FittedRuleList& list, std::span<const CategoryIndex> row);

struct TrainDiagnostics {
  bool rhat_checked = false;  // false with a single chain
  bool converged = false;
  std::size_t iterations = 0;  // per chain
  double final_rhat = 0.0;
  std::vector<std::pair<std::size_t, double>> rhat_history;  // (iteration, R-hat)
  double acceptance_rate = 0.0;
  int best_chain = 0;
  std::size_t best_iteration = 0;
};

struct TrainResult {
  FittedRuleList model;
  TrainDiagnostics diagnostics;
};

// Runs config.n_chains chains, checking R-hat on the log-posterior traces every
// check_interval iterations, until R-hat <= rhat_threshold or max_iters. The
// point estimate is the highest-posterior thinned sample from the second half
// of any chain. With no mined rules the result is the default-only list.
TrainResult train(const CategoricalDataset& dataset, const std::vector<Rule>& mined_rules,
                  const BrlConfig& config);
TrainResult train(const BrlProblem& problem, const CategoricalDataset& dataset,
                  const BrlConfig& config);

}  // namespace mcabrl

#endif  // MCABRL_BRL_H_
