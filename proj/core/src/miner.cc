#include "mcabrl/miner.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <thread>

namespace mcabrl {

void MinerConfig::validate() const {
  if (r_max < 1) throw std::invalid_argument("r_max must be >= 1");
  if (top_m < 1) throw std::invalid_argument("M (top rules per label) must be >= 1");
  if (!(s_min > 0.0)) throw std::invalid_argument("s_min must be > 0");
  if (std::isnan(mu_min)) throw std::invalid_argument("mu_min is NaN");
}

ScoreTable::ScoreTable(const CategoricalDataset& dataset, const McaModel& model,
                       bool signed_scores)
    : n_labels_(dataset.n_labels()), literals_(dataset.literals()) {
  std::vector<bool> label_present(n_labels_);
  for (LabelIndex k = 0; k < n_labels_; ++k) label_present[k] = model.label_column(k).has_value();

  scores_.resize(literals_.size());
  for (std::size_t i = 0; i < literals_.size(); ++i) {
    auto& row = scores_[i];
    row.assign(n_labels_, std::nullopt);
    bool ok = true;
    for (LabelIndex k = 0; k < n_labels_ && ok; ++k) {
      if (!label_present[k]) continue;
      try {
        const double rho = literal_label_score(model, literals_[i], k);
        row[k] = signed_scores ? rho : std::abs(rho);
      } catch (const ScoreUndefined&) {
        ok = false;
      }
    }
    if (!ok) {
      row.assign(n_labels_, std::nullopt);
    } else {
      eligible_.push_back(literals_[i]);
    }
  }
}

ScoreTable::ScoreTable(std::vector<Literal> literals,
                       std::vector<std::vector<std::optional<double>>> scores)
    : literals_(std::move(literals)), scores_(std::move(scores)) {
  if (literals_.size() != scores_.size()) {
    throw std::invalid_argument("one score row per literal required");
  }
  n_labels_ = scores_.empty() ? 0 : scores_.front().size();
  std::vector<std::size_t> order(literals_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return literals_[a] < literals_[b]; });
  std::vector<Literal> sorted_literals;
  std::vector<std::vector<std::optional<double>>> sorted_scores;
  for (const auto i : order) {
    if (scores_[i].size() != n_labels_) throw std::invalid_argument("ragged score table");
    sorted_literals.push_back(literals_[i]);
    sorted_scores.push_back(scores_[i]);
  }
  literals_ = std::move(sorted_literals);
  scores_ = std::move(sorted_scores);
  for (std::size_t i = 0; i < literals_.size(); ++i) {
    if (std::all_of(scores_[i].begin(), scores_[i].end(),
                    [](const auto& s) { return s.has_value(); })) {
      eligible_.push_back(literals_[i]);
    }
  }
}

std::size_t ScoreTable::index_of(const Literal& literal) const {
  const auto it = std::lower_bound(literals_.begin(), literals_.end(), literal);
  if (it == literals_.end() || *it != literal) {
    throw ScoreUndefined("literal not in score table");
  }
  return static_cast<std::size_t>(it - literals_.begin());
}

bool ScoreTable::defined(const Literal& literal) const {
  return std::binary_search(eligible_.begin(), eligible_.end(), literal);
}

double ScoreTable::score(const Literal& literal, LabelIndex label) const {
  const auto& s = scores_[index_of(literal)].at(label);
  if (!s) throw ScoreUndefined("score undefined for literal");
  return *s;
}

double ScoreTable::max_score(LabelIndex label) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& l : eligible_) {
    const auto& s = scores_[index_of(l)][label];
    if (s) best = std::max(best, *s);
  }
  return best;
}

double rule_score(const Rule& rule, const ScoreTable& scores, LabelIndex label) {
  double sum = 0.0;
  for (const auto& l : rule.literals()) sum += scores.score(l, label);
  return sum / static_cast<double>(rule.size());
}

double score_bound(std::size_t current_len, double mu_min, double rho_bar) {
  const auto len = static_cast<double>(current_len);
  return ((len + 1.0) * mu_min - rho_bar) / len;
}

bool ranks_before(const ScoredRule& a, const ScoredRule& b) {
  if (a.score != b.score) return a.score > b.score;
  return shorter_then_canonical(a.rule, b.rule);
}

std::vector<ScoredRule> merge_labels(const std::vector<std::vector<ScoredRule>>& per_label) {
  std::map<Rule, const ScoredRule*> best;
  for (const auto& rules : per_label) {
    for (const auto& r : rules) {
      auto [it, inserted] = best.try_emplace(r.rule, &r);
      if (!inserted && r.score > it->second->score) it->second = &r;
    }
  }
  std::vector<ScoredRule> out;
  for (const auto& rules : per_label) {
    for (const auto& r : rules) {
      if (best.at(r.rule) == &r) out.push_back(r);
    }
  }
  return out;
}

namespace {

// Slack on the extension bound so that rounding never prunes a rule whose
// bound holds with equality.
constexpr double kBoundSlack = 1e-12;

std::vector<ScoredRule> mine_label(const ScoreTable& scores, const RowIndex& index,
                                   const MinerConfig& config, LabelIndex label) {
  std::vector<ScoredRule> out;
  if (index.label_count(label) == 0) return out;

  const std::vector<Literal>& literals = scores.eligible();
  std::vector<double> rho(literals.size());
  for (std::size_t i = 0; i < literals.size(); ++i) rho[i] = scores.score(literals[i], label);

  const double floor = config.mu_min;
  const double rho_bar = scores.max_score(label);
  const auto top_m = static_cast<std::size_t>(config.top_m);

  std::map<Rule, ScoredRule> found;
  // The M largest scores seen so far; top() is the M-th best.
  std::priority_queue<double, std::vector<double>, std::greater<>> best_scores;
  auto add = [&](const Rule& rule, double score, double supp) {
    best_scores.push(score);
    if (best_scores.size() > top_m) best_scores.pop();
    found.emplace(rule, ScoredRule{rule, label, score, supp});
  };
  auto current_floor = [&] {
    return best_scores.size() >= top_m ? std::max(floor, best_scores.top()) : floor;
  };

  for (std::size_t i = 0; i < literals.size(); ++i) {
    if (rho[i] < floor) continue;
    Rule rule({literals[i]});
    const double supp = support(rule, index, label);
    if (supp >= config.s_min) add(rule, rho[i], supp);
  }

  for (int len = 1; len < config.r_max; ++len) {
    std::vector<const ScoredRule*> level;
    for (const auto& [rule, scored] : found) {
      if (rule.size() == static_cast<std::size_t>(len)) level.push_back(&scored);
    }
    for (const ScoredRule* parent : level) {
      const double mu_min = current_floor();
      if (parent->score < score_bound(len, mu_min, rho_bar) - kBoundSlack) continue;
      const RowBits parent_rows = index.rule_rows(parent->rule) & index.label(label);
      for (std::size_t i = 0; i < literals.size(); ++i) {
        const Literal& l = literals[i];
        if (parent->rule.uses_attribute(l.attribute)) continue;
        Rule candidate = parent->rule.extended(l);
        if (found.contains(candidate)) continue;
        const double mu = rule_score(candidate, scores, label);
        if (mu < mu_min) continue;
        const double supp = static_cast<double>(parent_rows.count_and(index.literal(l))) /
                            static_cast<double>(index.label_count(label));
        if (supp < config.s_min) continue;
        add(candidate, mu, supp);
      }
    }
  }

  out.reserve(found.size());
  for (auto& [rule, scored] : found) out.push_back(std::move(scored));
  std::sort(out.begin(), out.end(), ranks_before);
  if (out.size() > top_m) out.resize(top_m);
  return out;
}

}  // namespace

MineResult mine(const CategoricalDataset& dataset, const ScoreTable& scores,
                const MinerConfig& config) {
  config.validate();
  if (scores.n_labels() != dataset.n_labels()) {
    throw std::invalid_argument("score table and dataset disagree on the number of labels");
  }
  const RowIndex index(dataset);
  const std::size_t n_labels = dataset.n_labels();

  MineResult result;
  result.per_label.resize(n_labels);

  unsigned workers = config.threads ? config.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(n_labels));
  if (workers == 1) {
    for (LabelIndex k = 0; k < n_labels; ++k) {
      result.per_label[k] = mine_label(scores, index, config, k);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = next++; k < n_labels; k = next++) {
            result.per_label[k] = mine_label(scores, index, config, static_cast<LabelIndex>(k));
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  result.rules = merge_labels(result.per_label);
  result.status = result.rules.empty() ? MineStatus::kEmpty : MineStatus::kOk;
  return result;
}

MineResult mine(const CategoricalDataset& dataset, const McaModel& model,
                const MinerConfig& config) {
  return mine(dataset, ScoreTable(dataset, model, config.signed_scores), config);
}

}  // namespace mcabrl
