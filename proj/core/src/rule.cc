#include "mcabrl/rule.h"

#include <algorithm>
#include <stdexcept>

namespace mcabrl {

Rule::Rule(std::vector<Literal> literals) : literals_(std::move(literals)) {
  if (literals_.empty()) throw std::invalid_argument("a rule needs at least one literal");
  std::sort(literals_.begin(), literals_.end());
  for (std::size_t i = 1; i < literals_.size(); ++i) {
    if (literals_[i].attribute == literals_[i - 1].attribute) {
      throw std::invalid_argument("two literals on attribute " +
                                  std::to_string(literals_[i].attribute));
    }
  }
}

bool Rule::uses_attribute(std::uint32_t attribute) const {
  for (const auto& l : literals_) {
    if (l.attribute == attribute) return true;
  }
  return false;
}

Rule Rule::extended(const Literal& literal) const {
  if (uses_attribute(literal.attribute)) {
    throw std::invalid_argument("attribute already used by the rule");
  }
  Rule out;
  out.literals_.reserve(literals_.size() + 1);
  const auto pos = std::lower_bound(literals_.begin(), literals_.end(), literal);
  out.literals_.insert(out.literals_.end(), literals_.begin(), pos);
  out.literals_.push_back(literal);
  out.literals_.insert(out.literals_.end(), pos, literals_.end());
  return out;
}

std::string Rule::describe(const CategoricalDataset& dataset) const {
  std::string out;
  for (std::size_t i = 0; i < literals_.size(); ++i) {
    if (i) out += " and ";
    out += dataset.describe(literals_[i]);
  }
  return out;
}

const char* to_string(MineStatus status) {
  switch (status) {
    case MineStatus::kOk:
      return "ok";
    case MineStatus::kEmpty:
      return "empty";
    case MineStatus::kBudgetExceeded:
      return "budget-exceeded";
  }
  return "unknown";
}

RowIndex::RowIndex(const CategoricalDataset& dataset)
    : n_rows_(dataset.n_rows()), label_counts_(dataset.n_labels(), 0) {
  std::size_t total = 0;
  for (const auto& s : dataset.schemas()) {
    offsets_.push_back(total);
    total += s.categories.size();
  }
  literal_bits_.assign(total, RowBits(n_rows_));
  label_bits_.assign(dataset.n_labels(), RowBits(n_rows_));
  for (std::size_t i = 0; i < n_rows_; ++i) {
    const auto row = dataset.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) literal_bits_[offsets_[j] + row[j]].set(i);
    label_bits_[dataset.label(i)].set(i);
    ++label_counts_[dataset.label(i)];
  }
}

RowBits RowIndex::rule_rows(const Rule& rule) const {
  RowBits rows(n_rows_, true);
  for (const auto& l : rule.literals()) rows &= literal(l);
  return rows;
}

double support(const Rule& rule, const RowIndex& index, LabelIndex label) {
  const std::size_t class_size = index.label_count(label);
  if (class_size == 0) throw DataError("support undefined: label class is empty");
  const auto& lits = rule.literals();
  if (lits.size() == 1) {
    return static_cast<double>(index.literal(lits[0]).count_and(index.label(label))) /
           static_cast<double>(class_size);
  }
  RowBits rows = index.label(label);
  for (const auto& l : lits) rows &= index.literal(l);
  return static_cast<double>(rows.count()) / static_cast<double>(class_size);
}

double support(const Rule& rule, const CategoricalDataset& dataset, LabelIndex label) {
  return support(rule, RowIndex(dataset), label);
}

}  // namespace mcabrl
