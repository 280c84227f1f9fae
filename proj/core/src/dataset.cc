#include "mcabrl/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mcabrl {

std::optional<CategoryIndex> AttributeSchema::find(std::string_view category) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == category) return static_cast<CategoryIndex>(i);
  }
  return std::nullopt;
}

CategoricalDataset::CategoricalDataset(std::vector<AttributeSchema> schemas,
                                       std::string label_name,
                                       std::vector<std::string> label_names,
                                       std::vector<CategoryIndex> cells,
                                       std::vector<LabelIndex> labels)
    : schemas_(std::move(schemas)),
      label_name_(std::move(label_name)),
      label_names_(std::move(label_names)),
      cells_(std::move(cells)),
      labels_(std::move(labels)) {
  if (schemas_.empty()) throw DataError("dataset has no attributes");
  if (labels_.empty()) throw DataError("dataset has no rows");
  if (label_names_.size() < 2) {
    throw DataError("label column '" + label_name_ + "' needs at least two classes");
  }
  if (cells_.size() != labels_.size() * schemas_.size()) {
    throw DataError("cell matrix size does not match n_rows x n_attributes");
  }
  for (const auto& s : schemas_) {
    if (s.categories.size() < 2) {
      throw DataError("attribute '" + s.name + "' has fewer than two categories");
    }
    std::set<std::string_view> seen(s.categories.begin(), s.categories.end());
    if (seen.size() != s.categories.size()) {
      throw DataError("attribute '" + s.name + "' has duplicate category labels");
    }
  }
  {
    std::set<std::string_view> seen(label_names_.begin(), label_names_.end());
    if (seen.size() != label_names_.size()) throw DataError("duplicate label names");
  }
  const std::size_t p = schemas_.size();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= label_names_.size()) throw DataError("label index out of range");
    for (std::size_t j = 0; j < p; ++j) {
      if (cells_[i * p + j] >= schemas_[j].categories.size()) {
        throw DataError("category index out of range in row " + std::to_string(i + 1));
      }
    }
  }
}

std::size_t CategoricalDataset::total_categories() const {
  std::size_t total = 0;
  for (const auto& s : schemas_) total += s.categories.size();
  return total;
}

std::vector<std::size_t> CategoricalDataset::label_counts() const {
  std::vector<std::size_t> counts(label_names_.size(), 0);
  for (const auto y : labels_) ++counts[y];
  return counts;
}

std::vector<Literal> CategoricalDataset::literals() const {
  std::vector<Literal> out;
  out.reserve(total_categories());
  for (std::uint32_t a = 0; a < schemas_.size(); ++a) {
    for (CategoryIndex c = 0; c < schemas_[a].categories.size(); ++c) out.push_back({a, c});
  }
  return out;
}

std::string CategoricalDataset::describe(const Literal& literal) const {
  const auto& s = schemas_.at(literal.attribute);
  return s.name + " is " + s.categories.at(literal.category);
}

CategoricalDataset CategoricalDataset::subset(std::span<const std::size_t> indices) const {
  const std::size_t p = schemas_.size();
  std::vector<CategoryIndex> cells;
  cells.reserve(indices.size() * p);
  std::vector<LabelIndex> labels;
  labels.reserve(indices.size());
  for (const auto i : indices) {
    if (i >= labels_.size()) throw DataError("subset index out of range");
    auto r = row(i);
    cells.insert(cells.end(), r.begin(), r.end());
    labels.push_back(labels_[i]);
  }
  return CategoricalDataset(schemas_, label_name_, label_names_, std::move(cells),
                            std::move(labels));
}

// ---------------------------------------------------------------------------
// CSV

CsvTable read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes `` from `""` at end of input
  char ch;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A line holding a single empty field is a blank line.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  while (in.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (in.peek() == '\n') in.get(ch);
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("CSV ends inside a quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw DataError("CSV file is empty");
  CsvTable table;
  table.header = std::move(records.front());
  // Strip a UTF-8 byte order mark from the first column name.
  if (!table.header.empty() && table.header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    table.header[0].erase(0, 3);
  }
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != table.header.size()) {
      throw DataError("row " + std::to_string(i + 1) + " has " +
                      std::to_string(table.rows[i].size()) + " fields, header has " +
                      std::to_string(table.header.size()));
    }
  }
  return table;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    const auto& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out << f;
      continue;
    }
    out << '"';
    for (const char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << '\n';
}

namespace {

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("column '" + name + "' not found in CSV header");
  return static_cast<std::size_t>(it - header.begin());
}

double parse_number(const std::string& text, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(value)) {
    throw DataError("row " + std::to_string(row + 1) + ": column '" + column +
                    "' is declared numeric but holds '" + text + "'");
  }
  return value;
}

std::string format_edge(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

CategoricalDataset parse_csv(std::istream& in, const CsvOptions& options) {
  const CsvTable table = read_csv(in);
  if (options.label_column.empty()) throw DataError("no label column given");
  const std::size_t label_col = column_index(table.header, options.label_column);
  for (const auto& [name, bins] : options.numeric_bins) {
    if (bins != 2 && bins != 3) {
      throw DataError("column '" + name + "': bins must be 2 or 3, got " + std::to_string(bins));
    }
    if (column_index(table.header, name) == label_col) {
      throw DataError("the label column cannot be quantized");
    }
  }
  if (table.header.size() < 2) throw DataError("CSV has no attribute columns besides the label");
  if (table.rows.empty()) throw DataError("CSV has a header but no data rows");

  const std::size_t n = table.rows.size();
  std::vector<AttributeSchema> schemas;
  std::vector<std::vector<CategoryIndex>> columns;

  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c == label_col) continue;
    const std::string& name = table.header[c];
    AttributeSchema schema;
    schema.name = name;
    std::vector<CategoryIndex> column(n);

    const auto bins_it = options.numeric_bins.find(name);
    if (bins_it != options.numeric_bins.end()) {
      std::vector<double> values(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = table.rows[i][c];
        if (cell.empty()) {
          throw DataError("row " + std::to_string(i + 1) + ": empty cell in numeric column '" +
                          name + "'");
        }
        values[i] = parse_number(cell, i, name);
      }
      schema.kind = AttributeKind::kQuantizedNumeric;
      try {
        schema.bin_edges = quantile_edges(values, bins_it->second);
      } catch (const DataError& e) {
        throw DataError("column '" + name + "': " + e.what());
      }
      schema.categories = bin_labels(schema.bin_edges);
      for (std::size_t i = 0; i < n; ++i) column[i] = bin_of(values[i], schema.bin_edges);
    } else {
      std::unordered_map<std::string, CategoryIndex> index;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = table.rows[i][c];
        if (cell.empty() && !options.missing_as_category) {
          throw DataError("row " + std::to_string(i + 1) + ": empty cell in column '" + name +
                          "' (use --missing-as-category to keep it)");
        }
        auto [it, inserted] = index.try_emplace(cell, static_cast<CategoryIndex>(index.size()));
        if (inserted) schema.categories.push_back(cell);
        column[i] = it->second;
      }
    }

    if (schema.categories.size() < 2) {
      std::cerr << "warning: column '" << name << "' has a single value and is dropped\n";
      continue;
    }
    schemas.push_back(std::move(schema));
    columns.push_back(std::move(column));
  }
  if (schemas.empty()) throw DataError("no usable attribute columns");

  std::vector<std::string> label_names;
  std::unordered_map<std::string, LabelIndex> label_index;
  std::vector<LabelIndex> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cell = table.rows[i][label_col];
    if (cell.empty()) throw DataError("row " + std::to_string(i + 1) + ": empty label");
    auto [it, inserted] =
        label_index.try_emplace(cell, static_cast<LabelIndex>(label_names.size()));
    if (inserted) label_names.push_back(cell);
    labels[i] = it->second;
  }

  const std::size_t p = schemas.size();
  std::vector<CategoryIndex> cells(n * p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) cells[i * p + j] = columns[j][i];
  }
  return CategoricalDataset(std::move(schemas), options.label_column, std::move(label_names),
                            std::move(cells), std::move(labels));
}

CategoricalDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_csv(in, options);
}

void write_csv(const CategoricalDataset& dataset, std::ostream& out) {
  std::vector<std::string> fields;
  for (const auto& s : dataset.schemas()) fields.push_back(s.name);
  fields.push_back(dataset.label_name());
  write_csv_row(out, fields);
  for (std::size_t i = 0; i < dataset.n_rows(); ++i) {
    fields.clear();
    for (std::size_t j = 0; j < dataset.n_attributes(); ++j) {
      fields.push_back(dataset.schema(j).categories[dataset.cell(i, j)]);
    }
    fields.push_back(dataset.label_names()[dataset.label(i)]);
    write_csv_row(out, fields);
  }
}

EncodedTable encode_csv(const CsvTable& table, const std::vector<AttributeSchema>& schemas,
                        const std::string& label_name,
                        const std::vector<std::string>& label_names) {
  EncodedTable out;
  out.n_attributes = schemas.size();
  std::vector<std::size_t> cols;
  for (const auto& s : schemas) cols.push_back(column_index(table.header, s.name));

  const auto label_it = std::find(table.header.begin(), table.header.end(), label_name);
  const bool has_label = label_it != table.header.end();
  const std::size_t label_col = has_label ? label_it - table.header.begin() : 0;
  if (has_label) out.labels.emplace();

  out.cells.reserve(table.rows.size() * schemas.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    for (std::size_t j = 0; j < schemas.size(); ++j) {
      const auto& s = schemas[j];
      const auto& cell = row[cols[j]];
      if (s.kind == AttributeKind::kQuantizedNumeric) {
        if (cell.empty()) {
          throw DataError("row " + std::to_string(i + 1) + ": empty cell in numeric column '" +
                          s.name + "'");
        }
        // Either a raw number or an already-binned label (as written by
        // write_csv).
        if (auto c = s.find(cell)) {
          out.cells.push_back(*c);
        } else {
          out.cells.push_back(bin_of(parse_number(cell, i, s.name), s.bin_edges));
        }
      } else {
        const auto c = s.find(cell);
        if (!c) {
          throw DataError("row " + std::to_string(i + 1) + ": column '" + s.name +
                          "' has unknown category '" + cell + "'");
        }
        out.cells.push_back(*c);
      }
    }
    if (has_label) {
      const auto& cell = row[label_col];
      const auto it = std::find(label_names.begin(), label_names.end(), cell);
      if (it == label_names.end()) {
        throw DataError("row " + std::to_string(i + 1) + ": unknown label '" + cell + "'");
      }
      out.labels->push_back(static_cast<LabelIndex>(it - label_names.begin()));
    }
  }
  return out;
}

CategoricalDataset load_csv_with_schema(std::istream& in,
                                        const std::vector<AttributeSchema>& schemas,
                                        const std::string& label_name,
                                        const std::vector<std::string>& label_names) {
  const CsvTable table = read_csv(in);
  EncodedTable encoded = encode_csv(table, schemas, label_name, label_names);
  if (!encoded.labels) throw DataError("label column '" + label_name + "' not found");
  return CategoricalDataset(schemas, label_name, label_names, std::move(encoded.cells),
                            std::move(*encoded.labels));
}

// ---------------------------------------------------------------------------
// Quantization

std::vector<double> quantile_edges(std::span<const double> values, int bins) {
  if (bins < 2) throw DataError("need at least two bins");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> uniq(sorted);
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (uniq.size() < static_cast<std::size_t>(bins)) {
    throw DataError("fewer distinct values (" + std::to_string(uniq.size()) + ") than bins (" +
                    std::to_string(bins) + ")");
  }

  const double max_value = sorted.back();
  const double n_minus_1 = static_cast<double>(sorted.size() - 1);
  std::vector<double> edges;
  for (int j = 1; j < bins; ++j) {
    const double h = n_minus_1 * j / bins;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double edge = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    if (edge >= max_value) continue;
    if (!edges.empty() && edge <= edges.back()) continue;
    edges.push_back(edge);
  }
  if (edges.empty()) {
    // Heavy mass on the maximum: split just below it.
    edges.push_back(uniq[uniq.size() - 2]);
  }
  return edges;
}

CategoryIndex bin_of(double value, std::span<const double> edges) {
  const auto it = std::lower_bound(edges.begin(), edges.end(), value);
  return static_cast<CategoryIndex>(it - edges.begin());
}

std::vector<CategoryIndex> quantize_numeric(std::span<const double> values, int bins) {
  if (bins != 2 && bins != 3) throw DataError("bins must be 2 or 3");
  const auto edges = quantile_edges(values, bins);
  std::vector<CategoryIndex> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = bin_of(values[i], edges);
  return out;
}

std::vector<std::string> bin_labels(std::span<const double> edges) {
  std::vector<std::string> labels;
  if (edges.empty()) return labels;
  labels.push_back("<=" + format_edge(edges.front()));
  for (std::size_t b = 1; b < edges.size(); ++b) {
    labels.push_back("(" + format_edge(edges[b - 1]) + "," + format_edge(edges[b]) + "]");
  }
  labels.push_back(">" + format_edge(edges.back()));
  return labels;
}

// ---------------------------------------------------------------------------
// Cross-validation

std::vector<Fold> stratified_kfold(std::span<const LabelIndex> labels, std::size_t n_labels,
                                   int k, std::uint64_t seed) {
  if (k < 2) throw DataError("k-fold needs k >= 2, got " + std::to_string(k));
  std::vector<std::vector<std::size_t>> by_class(n_labels);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= n_labels) throw DataError("label index out of range");
    by_class[labels[i]].push_back(i);
  }
  for (std::size_t c = 0; c < n_labels; ++c) {
    if (by_class[c].size() < static_cast<std::size_t>(k)) {
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                      " samples, fewer than k=" + std::to_string(k));
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> test_sets(k);
  std::size_t offset = 0;
  for (auto& members : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (const auto i : members) {
      test_sets[offset % k].push_back(i);
      ++offset;
    }
  }

  std::vector<Fold> folds(k);
  std::vector<int> owner(labels.size());
  for (int f = 0; f < k; ++f) {
    for (const auto i : test_sets[f]) owner[i] = f;
  }
  for (int f = 0; f < k; ++f) {
    folds[f].test = test_sets[f];
    std::sort(folds[f].test.begin(), folds[f].test.end());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (owner[i] != f) folds[f].train.push_back(i);
    }
  }
  return folds;
}

std::vector<Fold> stratified_kfold(const CategoricalDataset& dataset, int k, std::uint64_t seed) {
  return stratified_kfold(dataset.labels(), dataset.n_labels(), k, seed);
}

}  // namespace mcabrl
