#ifndef MCABRL_CLI_SYNTHETIC_H_
#define MCABRL_CLI_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>

#include "mcabrl/dataset.h"

namespace mcabrl::cli {

struct SyntheticSpec {
  std::size_t rows = 500;
  std::size_t attributes = 10;
  std::size_t categories = 3;
  std::size_t labels = 2;
  // Share of attributes that carry signal. In a signal attribute, with
  // probability `signal_strength` the category is forced to (label mod
  // categories); otherwise it is uniform like every other attribute.
  double signal_fraction = 0.1;
  double signal_strength = 0.6;
  std::uint64_t seed = 0;
};

// Labels are dealt round-robin and then shuffled, so every class occurs.
// Every declared category is kept in the schema even if no row uses it.
CategoricalDataset make_synthetic(const SyntheticSpec& params);

}  // namespace mcabrl::cli

#endif  // MCABRL_CLI_SYNTHETIC_H_
