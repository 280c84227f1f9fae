#ifndef MCABRL_RULE_H_
#define MCABRL_RULE_H_

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mcabrl/dataset.h"
#include "mcabrl/row_bits.h"

namespace mcabrl {

// Conjunction of literals over distinct attributes, kept sorted by
// (attribute, category) so that equal rules compare equal.
class Rule {
 public:
  Rule() = default;
  // Sorts the literals. Throws std::invalid_argument on an empty list or when
  // two literals share an attribute.
  explicit Rule(std::vector<Literal> literals);

  std::size_t size() const { return literals_.size(); }
  const std::vector<Literal>& literals() const { return literals_; }
  bool uses_attribute(std::uint32_t attribute) const;

  // Rule with `literal` added. The attribute must not already be used.
  Rule extended(const Literal& literal) const;

  bool matches(std::span<const CategoryIndex> row) const {
    for (const auto& l : literals_) {
      if (row[l.attribute] != l.category) return false;
    }
    return true;
  }

  std::string describe(const CategoricalDataset& dataset) const;

  auto operator<=>(const Rule&) const = default;

 private:
  std::vector<Literal> literals_;
};

// Interpretability-first order: shorter rules, then lexicographic literals.
inline bool shorter_then_canonical(const Rule& a, const Rule& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

struct ScoredRule {
  Rule rule;
  LabelIndex label = 0;
  double score = 0.0;    // mu_k(r) for the MCA miner, confidence for Apriori
  double support = 0.0;  // supp_k(r)

  bool operator==(const ScoredRule&) const = default;
};

enum class MineStatus { kOk, kEmpty, kBudgetExceeded };
const char* to_string(MineStatus status);

// Row bitsets for every literal and every label class of one dataset.
class RowIndex {
 public:
  explicit RowIndex(const CategoricalDataset& dataset);

  std::size_t n_rows() const { return n_rows_; }
  const RowBits& literal(const Literal& l) const { return literal_bits_[offsets_[l.attribute] + l.category]; }
  const RowBits& label(LabelIndex k) const { return label_bits_[k]; }
  std::size_t label_count(LabelIndex k) const { return label_counts_[k]; }

  RowBits rule_rows(const Rule& rule) const;

 private:
  std::size_t n_rows_;
  std::vector<std::size_t> offsets_;
  std::vector<RowBits> literal_bits_;
  std::vector<RowBits> label_bits_;
  std::vector<std::size_t> label_counts_;
};

// supp_k(r): fraction of class-k rows on which the rule is true. Throws
// DataError for an empty class.
double support(const Rule& rule, const RowIndex& index, LabelIndex label);
double support(const Rule& rule, const CategoricalDataset& dataset, LabelIndex label);

}  // namespace mcabrl

#endif  // MCABRL_RULE_H_
