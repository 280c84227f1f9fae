#ifndef MCABRL_ROW_BITS_H_
#define MCABRL_ROW_BITS_H_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mcabrl {

// Fixed-size bitset over dataset rows. All binary operations require equal
// sizes.
class RowBits {
 public:
  RowBits() = default;
  explicit RowBits(std::size_t n_rows, bool value = false);

  std::size_t size() const { return n_rows_; }
  bool test(std::size_t row) const {
    return (words_[row >> 6] >> (row & 63)) & 1u;
  }
  void set(std::size_t row) { words_[row >> 6] |= std::uint64_t{1} << (row & 63); }
  void reset(std::size_t row) {
    words_[row >> 6] &= ~(std::uint64_t{1} << (row & 63));
  }

  std::size_t count() const;
  bool any() const;

  RowBits& operator&=(const RowBits& other);
  RowBits& operator|=(const RowBits& other);
  // this &= ~other
  RowBits& and_not(const RowBits& other);

  // popcount(this & other) without materializing the intersection.
  std::size_t count_and(const RowBits& other) const;

  friend RowBits operator&(RowBits lhs, const RowBits& rhs) { return lhs &= rhs; }
  bool operator==(const RowBits&) const = default;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void clear_tail();

  std::size_t n_rows_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace mcabrl

#endif  // MCABRL_ROW_BITS_H_
