#include "cli/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace mcabrl::cli {

CategoricalDataset make_synthetic(const SyntheticSpec& params) {
  if (params.rows < params.labels || params.labels < 2 || params.categories < 2 || params.attributes < 1) {
    throw std::invalid_argument("synthetic data needs rows >= labels >= 2, categories >= 2");
  }
  std::mt19937_64 rng(params.seed);
  std::vector<LabelIndex> labels(params.rows);
  for (std::size_t i = 0; i < params.rows; ++i) labels[i] = static_cast<LabelIndex>(i % params.labels);
  std::shuffle(labels.begin(), labels.end(), rng);

  const auto n_signal = static_cast<std::size_t>(
      std::lround(params.signal_fraction * static_cast<double>(params.attributes)));
  // Signal attributes are spread evenly over the columns.
  std::vector<bool> is_signal(params.attributes, false);
  for (std::size_t s = 0; s < n_signal; ++s) is_signal[s * params.attributes / n_signal] = true;

  std::uniform_int_distribution<CategoryIndex> uniform(
      0, static_cast<CategoryIndex>(params.categories - 1));
  std::bernoulli_distribution planted(params.signal_strength);
  std::vector<CategoryIndex> cells(params.rows * params.attributes);
  for (std::size_t i = 0; i < params.rows; ++i) {
    for (std::size_t j = 0; j < params.attributes; ++j) {
      CategoryIndex c = uniform(rng);
      if (is_signal[j] && planted(rng)) c = static_cast<CategoryIndex>(labels[i] % params.categories);
      cells[i * params.attributes + j] = c;
    }
  }

  std::vector<AttributeSchema> schemas(params.attributes);
  for (std::size_t j = 0; j < params.attributes; ++j) {
    schemas[j].name = "a" + std::to_string(j);
    for (std::size_t c = 0; c < params.categories; ++c) {
      schemas[j].categories.push_back("c" + std::to_string(c));
    }
  }
  std::vector<std::string> label_names;
  for (std::size_t k = 0; k < params.labels; ++k) label_names.push_back("y" + std::to_string(k));
  return CategoricalDataset(std::move(schemas), "label", std::move(label_names), std::move(cells),
                            std::move(labels));
}

}  // namespace mcabrl::cli
