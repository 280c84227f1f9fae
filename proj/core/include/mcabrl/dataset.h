#ifndef MCABRL_DATASET_H_
#define MCABRL_DATASET_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcabrl {

// Raised for malformed or unusable input data. Messages are meant to be shown
// to the user as-is.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using CategoryIndex = std::uint32_t;
using LabelIndex = std::uint32_t;

enum class AttributeKind { kCategorical, kQuantizedNumeric };

struct AttributeSchema {
  std::string name;
  std::vector<std::string> categories;
  AttributeKind kind = AttributeKind::kCategorical;
  // Quantized-numeric only: value v falls in the first bin b with
  // v <= bin_edges[b], or in the last bin if it exceeds every edge.
  std::vector<double> bin_edges;

  std::optional<CategoryIndex> find(std::string_view category) const;
  bool operator==(const AttributeSchema&) const = default;
};

// "attribute `attribute` takes category `category`".
struct Literal {
  std::uint32_t attribute = 0;
  CategoryIndex category = 0;

  auto operator<=>(const Literal&) const = default;
};

// n samples x p categorical attributes plus one label column with at least two
// classes. Immutable once constructed.
class CategoricalDataset {
 public:
  // `cells` is row-major, n_rows x schemas.size(). Throws DataError if any
  // invariant is violated.
  CategoricalDataset(std::vector<AttributeSchema> schemas, std::string label_name,
                     std::vector<std::string> label_names,
                     std::vector<CategoryIndex> cells, std::vector<LabelIndex> labels);

  std::size_t n_rows() const { return labels_.size(); }
  std::size_t n_attributes() const { return schemas_.size(); }
  std::size_t n_labels() const { return label_names_.size(); }
  // Sum of |a_i| over all attributes.
  std::size_t total_categories() const;

  const std::vector<AttributeSchema>& schemas() const { return schemas_; }
  const AttributeSchema& schema(std::size_t attribute) const { return schemas_[attribute]; }
  const std::string& label_name() const { return label_name_; }
  const std::vector<std::string>& label_names() const { return label_names_; }

  CategoryIndex cell(std::size_t row, std::size_t attribute) const {
    return cells_[row * schemas_.size() + attribute];
  }
  std::span<const CategoryIndex> row(std::size_t i) const {
    return {cells_.data() + i * schemas_.size(), schemas_.size()};
  }
  LabelIndex label(std::size_t i) const { return labels_[i]; }
  const std::vector<LabelIndex>& labels() const { return labels_; }
  std::vector<std::size_t> label_counts() const;

  // Every literal of every attribute in (attribute, category) order.
  std::vector<Literal> literals() const;
  // "name is category"
  std::string describe(const Literal& literal) const;

  // Rows `indices` in the given order, with schemas and label names kept.
  CategoricalDataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<AttributeSchema> schemas_;
  std::string label_name_;
  std::vector<std::string> label_names_;
  std::vector<CategoryIndex> cells_;
  std::vector<LabelIndex> labels_;
};

struct CsvOptions {
  std::string label_column;
  // Column name -> number of quantile bins (2 or 3).
  std::map<std::string, int> numeric_bins;
  // Treat empty cells as an explicit "" category instead of rejecting them.
  bool missing_as_category = false;
};

// RFC-4180 reader: header row plus data rows, quoted fields may contain
// commas, doubled quotes and line breaks. Blank trailing lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& in);
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

// Builds a dataset from CSV. Non-label columns not listed in numeric_bins are
// categorical with categories in first-occurrence order. Columns holding a
// single distinct value carry no information and are dropped (a warning is
// written to stderr).
CategoricalDataset load_csv(const std::filesystem::path& path, const CsvOptions& options);
CategoricalDataset parse_csv(std::istream& in, const CsvOptions& options);

// Writes category labels; reading back with the same schemas reproduces the
// dataset exactly.
void write_csv(const CategoricalDataset& dataset, std::ostream& out);

// Rows encoded against an existing schema, e.g. the one stored in a model.
// Columns are matched by name; extra CSV columns are ignored.
struct EncodedTable {
  std::size_t n_attributes = 0;
  std::vector<CategoryIndex> cells;
  std::optional<std::vector<LabelIndex>> labels;  // set iff the label column was present

  std::size_t n_rows() const { return n_attributes == 0 ? 0 : cells.size() / n_attributes; }
  std::span<const CategoryIndex> row(std::size_t i) const {
    return {cells.data() + i * n_attributes, n_attributes};
  }
};
EncodedTable encode_csv(const CsvTable& table, const std::vector<AttributeSchema>& schemas,
                        const std::string& label_name,
                        const std::vector<std::string>& label_names);
// Same, but the label column is required and the result is a full dataset.
CategoricalDataset load_csv_with_schema(std::istream& in,
                                        const std::vector<AttributeSchema>& schemas,
                                        const std::string& label_name,
                                        const std::vector<std::string>& label_names);

// Equal-frequency bin edges at the j/bins quantiles (linear interpolation
// between order statistics). Edges that would leave a bin empty are dropped.
// Throws DataError when there are fewer than `bins` distinct values.
std::vector<double> quantile_edges(std::span<const double> values, int bins);
CategoryIndex bin_of(double value, std::span<const double> edges);
std::vector<CategoryIndex> quantize_numeric(std::span<const double> values, int bins);
std::vector<std::string> bin_labels(std::span<const double> edges);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified k-fold split. Each class is shuffled with `seed` and dealt
// round-robin across folds; the dealing offset carries over between classes so
// fold sizes differ by at most one.
std::vector<Fold> stratified_kfold(std::span<const LabelIndex> labels, std::size_t n_labels,
                                   int k, std::uint64_t seed);
std::vector<Fold> stratified_kfold(const CategoricalDataset& dataset, int k, std::uint64_t seed);

}  // namespace mcabrl

#endif  // MCABRL_DATASET_H_
