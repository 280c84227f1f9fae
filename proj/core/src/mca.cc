#include "mcabrl/mca.h"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "json.hpp"

namespace mcabrl {

IndicatorMatrix build_indicator(const CategoricalDataset& dataset) {
  const std::size_t n = dataset.n_rows();
  const std::size_t p = dataset.n_attributes();

  std::vector<std::vector<std::size_t>> counts(p);
  for (std::size_t j = 0; j < p; ++j) counts[j].assign(dataset.schema(j).categories.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) ++counts[j][dataset.cell(i, j)];
  }
  const auto label_counts = dataset.label_counts();

  IndicatorMatrix out;
  out.n_variables = p + 1;
  // column index for each (attribute, category); SIZE_MAX when dropped
  std::vector<std::vector<std::size_t>> column_of(p);
  for (std::uint32_t j = 0; j < p; ++j) {
    column_of[j].assign(counts[j].size(), SIZE_MAX);
    for (std::uint32_t c = 0; c < counts[j].size(); ++c) {
      const ColumnOwner owner{false, j, c};
      if (counts[j][c] == 0) {
        out.dropped.push_back(owner);
        continue;
      }
      column_of[j][c] = out.owners.size();
      out.owners.push_back(owner);
    }
  }
  std::vector<std::size_t> label_column(label_counts.size(), SIZE_MAX);
  for (std::uint32_t k = 0; k < label_counts.size(); ++k) {
    const ColumnOwner owner{true, 0, k};
    if (label_counts[k] == 0) {
      out.dropped.push_back(owner);
      continue;
    }
    label_column[k] = out.owners.size();
    out.owners.push_back(owner);
  }

  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(out.owners.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < p; ++j) {
      out.values(r, static_cast<Eigen::Index>(column_of[j][dataset.cell(i, j)])) = 1.0;
    }
    out.values(r, static_cast<Eigen::Index>(label_column[dataset.label(i)])) = 1.0;
  }
  return out;
}

McaModel::McaModel(std::vector<ColumnOwner> owners, Eigen::VectorXd column_masses,
                   Eigen::VectorXd singular_values, Eigen::MatrixXd left, Eigen::MatrixXd right,
                   std::size_t n_labels)
    : owners_(std::move(owners)),
      column_masses_(std::move(column_masses)),
      singular_values_(std::move(singular_values)),
      left_(std::move(left)),
      right_(std::move(right)) {
  coords_ = column_masses_.cwiseSqrt().cwiseInverse().asDiagonal() * right_ *
            singular_values_.asDiagonal();
  coord_norms_ = coords_.rowwise().norm();
  max_coord_norm_ = coord_norms_.size() > 0 ? coord_norms_.maxCoeff() : 0.0;

  label_columns_.assign(n_labels, std::nullopt);
  for (std::size_t col = 0; col < owners_.size(); ++col) {
    const auto& o = owners_[col];
    if (o.is_label) {
      if (o.category >= label_columns_.size()) label_columns_.resize(o.category + 1);
      label_columns_[o.category] = col;
    } else {
      if (o.attribute >= literal_columns_.size()) literal_columns_.resize(o.attribute + 1);
      auto& cats = literal_columns_[o.attribute];
      if (o.category >= cats.size()) cats.resize(o.category + 1);
      cats[o.category] = col;
    }
  }
}

std::optional<std::size_t> McaModel::literal_column(const Literal& literal) const {
  if (literal.attribute >= literal_columns_.size()) return std::nullopt;
  const auto& cats = literal_columns_[literal.attribute];
  if (literal.category >= cats.size()) return std::nullopt;
  return cats[literal.category];
}

std::optional<std::size_t> McaModel::label_column(LabelIndex label) const {
  if (label >= label_columns_.size()) return std::nullopt;
  return label_columns_[label];
}

std::string McaModel::to_json() const {
  using nlohmann::json;
  json columns = json::array();
  for (std::size_t col = 0; col < owners_.size(); ++col) {
    const auto& o = owners_[col];
    json coords = json::array();
    for (Eigen::Index k = 0; k < coords_.cols(); ++k) {
      coords.push_back(coords_(static_cast<Eigen::Index>(col), k));
    }
    columns.push_back({{"kind", o.is_label ? "label" : "attribute"},
                       {"attribute", o.attribute},
                       {"category", o.category},
                       {"mass", column_masses_(static_cast<Eigen::Index>(col))},
                       {"coords", std::move(coords)}});
  }
  json sv = json::array();
  for (Eigen::Index k = 0; k < singular_values_.size(); ++k) sv.push_back(singular_values_(k));
  return json{{"n_components", n_components()}, {"singular_values", sv}, {"columns", columns}}
      .dump(2);
}

McaModel fit(const IndicatorMatrix& indicator, const McaOptions& options) {
  const Eigen::MatrixXd& n_mat = indicator.values;
  std::size_t n_labels = 0;
  for (const auto& o : indicator.owners) {
    if (o.is_label) n_labels = std::max<std::size_t>(n_labels, o.category + 1);
  }
  const Eigen::Index cols = n_mat.cols();
  const double grand_total = n_mat.sum();
  if (n_mat.rows() == 0 || cols == 0 || grand_total <= 0.0) {
    throw DataError("cannot fit MCA on an empty indicator matrix");
  }

  const Eigen::MatrixXd prob = n_mat / grand_total;
  const Eigen::VectorXd row_mass = prob.rowwise().sum();
  const Eigen::VectorXd col_mass = prob.colwise().sum().transpose();

  const Eigen::VectorXd row_scale = row_mass.cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd col_scale = col_mass.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd residual =
      row_scale.asDiagonal() * (prob - row_mass * col_mass.transpose()) * col_scale.asDiagonal();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(residual, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();

  Eigen::Index keep = 0;
  while (keep < sigma.size() && sigma(keep) > options.singular_value_floor) ++keep;
  if (options.max_components > 0) {
    keep = std::min<Eigen::Index>(keep, static_cast<Eigen::Index>(options.max_components));
  }

  Eigen::MatrixXd left = svd.matrixU().leftCols(keep);
  Eigen::MatrixXd right = svd.matrixV().leftCols(keep);
  for (Eigen::Index k = 0; k < keep; ++k) {
    Eigen::Index arg = 0;
    right.col(k).cwiseAbs().maxCoeff(&arg);
    if (right(arg, k) < 0.0) {
      right.col(k) *= -1.0;
      left.col(k) *= -1.0;
    }
  }
  return McaModel(indicator.owners, col_mass, sigma.head(keep), std::move(left),
                  std::move(right), n_labels);
}

McaModel fit_mca(const CategoricalDataset& dataset, const McaOptions& options) {
  return fit(build_indicator(dataset), options);
}

double literal_label_score(const McaModel& model, const Literal& literal, LabelIndex label) {
  const auto lc = model.literal_column(literal);
  const auto kc = model.label_column(label);
  if (!lc || !kc) throw ScoreUndefined("category or label absent from the MCA model");
  if (model.n_components() == 0) throw ScoreUndefined("MCA model has no components");

  const auto& g = model.category_coords();
  const auto v = g.row(static_cast<Eigen::Index>(*lc));
  const auto w = g.row(static_cast<Eigen::Index>(*kc));
  const double scale = model.max_coord_norm();
  const double nv = model.coord_norms()(static_cast<Eigen::Index>(*lc));
  const double nw = model.coord_norms()(static_cast<Eigen::Index>(*kc));
  constexpr double kRelativeZero = 1e-10;
  if (nv <= kRelativeZero * scale || nw <= kRelativeZero * scale) {
    throw ScoreUndefined("zero-norm principal coordinate row");
  }
  return std::clamp(v.dot(w) / (nv * nw), -1.0, 1.0);
}

}  // namespace mcabrl
