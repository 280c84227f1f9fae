#ifndef MCABRL_SERIALIZATION_H_
#define MCABRL_SERIALIZATION_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcabrl/brl.h"
#include "mcabrl/dataset.h"
#include "mcabrl/rule.h"

namespace mcabrl {

// Malformed or inconsistent artifact file.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

// Everything needed to re-encode raw rows the way a dataset was encoded.
struct SchemaInfo {
  std::vector<AttributeSchema> attributes;
  std::string label_name;
  std::vector<std::string> label_names;

  static SchemaInfo of(const CategoricalDataset& dataset);
  bool operator==(const SchemaInfo&) const = default;
};

// Ordered key/value pairs recording how an artifact was produced.
using ConfigRecord = std::vector<std::pair<std::string, std::string>>;

struct RuleFile {
  SchemaInfo schema;
  std::string algorithm;  // "mca" or "apriori"
  MineStatus status = MineStatus::kOk;
  ConfigRecord config;
  std::vector<ScoredRule> rules;
};

struct ModelFile {
  SchemaInfo schema;
  ConfigRecord config;
  FittedRuleList model;
  TrainDiagnostics diagnostics;
};

// Literals are written by attribute name and category label, so the files are
// readable on their own. Output is deterministic for identical inputs.
std::string to_json(const RuleFile& file);
std::string to_json(const ModelFile& file);

// Throw FormatError on anything malformed, including names that do not resolve
// against the embedded schema.
RuleFile parse_rule_file(std::string_view text);
ModelFile parse_model_file(std::string_view text);

// Top-down if / else if / else text, each clause ending in the predicted label
// and its probability.
std::string render_rule_list(const FittedRuleList& model, const SchemaInfo& schema);

// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);  // throws DataError

}  // namespace mcabrl

#endif  // MCABRL_SERIALIZATION_H_
