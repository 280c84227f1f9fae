#include "mcabrl/row_bits.h"

#include <cassert>

namespace mcabrl {

RowBits::RowBits(std::size_t n_rows, bool value)
    : n_rows_(n_rows),
      words_((n_rows + 63) / 64, value ? ~std::uint64_t{0} : std::uint64_t{0}) {
  clear_tail();
}

void RowBits::clear_tail() {
  const std::size_t tail = n_rows_ & 63;
  if (tail != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << tail) - 1;
  }
}

std::size_t RowBits::count() const {
  std::size_t total = 0;
  for (const auto w : words_) total += std::popcount(w);
  return total;
}

bool RowBits::any() const {
  for (const auto w : words_) {
    if (w != 0) return true;
  }
  return false;
}

RowBits& RowBits::operator&=(const RowBits& other) {
  assert(other.n_rows_ == n_rows_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

RowBits& RowBits::operator|=(const RowBits& other) {
  assert(other.n_rows_ == n_rows_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

RowBits& RowBits::and_not(const RowBits& other) {
  assert(other.n_rows_ == n_rows_);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

std::size_t RowBits::count_and(const RowBits& other) const {
  assert(other.n_rows_ == n_rows_);
  std::size_t total = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    total += std::popcount(words_[i] & other.words_[i]);
  }
  return total;
}

}  // namespace mcabrl
