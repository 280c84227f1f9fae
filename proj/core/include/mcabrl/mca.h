#ifndef MCABRL_MCA_H_
#define MCABRL_MCA_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcabrl/dataset.h"

namespace mcabrl {

// Which category a column of the indicator matrix encodes. For label columns
// `attribute` is unused and `category` is the label index.
struct ColumnOwner {
  bool is_label = false;
  std::uint32_t attribute = 0;
  std::uint32_t category = 0;

  bool operator==(const ColumnOwner&) const = default;
};

// One-hot encoding of Z = [X Y]. Categories that never occur are left out and
// listed in `dropped`.
struct IndicatorMatrix {
  Eigen::MatrixXd values;  // n_rows x J, entries 0/1
  std::vector<ColumnOwner> owners;
  std::vector<ColumnOwner> dropped;
  std::size_t n_variables = 0;  // p + 1

  std::size_t n_rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t n_columns() const { return static_cast<std::size_t>(values.cols()); }
};

IndicatorMatrix build_indicator(const CategoricalDataset& dataset);

struct McaOptions {
  // Keep at most this many leading components; 0 keeps all of them.
  std::size_t max_components = 2;
  // Components with a singular value at or below this are discarded.
  double singular_value_floor = 1e-12;
};

// Correspondence analysis of the indicator matrix.
//
// With P = N / sum(N), row masses r, column masses c and standardized
// residuals S = D_r^{-1/2} (P - r c^T) D_c^{-1/2} = U Sigma V^T, the column
// principal coordinates are G = D_c^{-1/2} V Sigma. Each right singular vector
// is signed so that its largest-magnitude entry is positive (U follows).
class McaModel {
 public:
  McaModel() = default;
  McaModel(std::vector<ColumnOwner> owners, Eigen::VectorXd column_masses,
           Eigen::VectorXd singular_values, Eigen::MatrixXd left, Eigen::MatrixXd right,
           std::size_t n_labels);

  std::size_t n_components() const { return static_cast<std::size_t>(singular_values_.size()); }
  std::size_t n_columns() const { return owners_.size(); }

  const std::vector<ColumnOwner>& owners() const { return owners_; }
  const Eigen::VectorXd& column_masses() const { return column_masses_; }
  const Eigen::VectorXd& singular_values() const { return singular_values_; }
  // J x K column principal coordinates.
  const Eigen::MatrixXd& category_coords() const { return coords_; }
  const Eigen::MatrixXd& left_vectors() const { return left_; }
  const Eigen::MatrixXd& right_vectors() const { return right_; }
  const Eigen::VectorXd& coord_norms() const { return coord_norms_; }
  double max_coord_norm() const { return max_coord_norm_; }
  double total_inertia() const { return singular_values_.squaredNorm(); }

  std::optional<std::size_t> literal_column(const Literal& literal) const;
  std::optional<std::size_t> label_column(LabelIndex label) const;

  // JSON dump of owners, masses, singular values and coordinates.
  std::string to_json() const;

 private:
  std::vector<ColumnOwner> owners_;
  Eigen::VectorXd column_masses_;
  Eigen::VectorXd singular_values_;
  Eigen::MatrixXd left_;
  Eigen::MatrixXd right_;
  Eigen::MatrixXd coords_;
  Eigen::VectorXd coord_norms_;
  double max_coord_norm_ = 0.0;
  std::vector<std::vector<std::optional<std::size_t>>> literal_columns_;
  std::vector<std::optional<std::size_t>> label_columns_;
};

McaModel fit(const IndicatorMatrix& indicator, const McaOptions& options = {});
McaModel fit_mca(const CategoricalDataset& dataset, const McaOptions& options = {});

// The literal's or label's coordinate row is missing or has zero norm.
class ScoreUndefined : public DataError {
 public:
  using DataError::DataError;
};

// rho_{l,k}: cosine of the angle between the literal's and the label's
// principal-coordinate rows.
double literal_label_score(const McaModel& model, const Literal& literal, LabelIndex label);

}  // namespace mcabrl

#endif  // MCABRL_MCA_H_
