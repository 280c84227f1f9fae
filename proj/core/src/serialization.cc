#include "mcabrl/serialization.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace mcabrl {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

const char* kind_name(AttributeKind kind) {
  return kind == AttributeKind::kQuantizedNumeric ? "quantized" : "categorical";
}

json schema_json(const SchemaInfo& schema) {
  json attrs = json::array();
  for (const auto& a : schema.attributes) {
    json entry = {{"name", a.name}, {"kind", kind_name(a.kind)}, {"categories", a.categories}};
    if (a.kind == AttributeKind::kQuantizedNumeric) entry["bin_edges"] = a.bin_edges;
    attrs.push_back(std::move(entry));
  }
  return {{"attributes", std::move(attrs)},
          {"label", schema.label_name},
          {"label_names", schema.label_names}};
}

SchemaInfo parse_schema(const json& j) {
  SchemaInfo s;
  for (const auto& a : j.at("attributes")) {
    AttributeSchema attr;
    attr.name = a.at("name").get<std::string>();
    attr.categories = a.at("categories").get<std::vector<std::string>>();
    const auto kind = a.at("kind").get<std::string>();
    if (kind == "quantized") {
      attr.kind = AttributeKind::kQuantizedNumeric;
      attr.bin_edges = a.at("bin_edges").get<std::vector<double>>();
    } else if (kind != "categorical") {
      throw FormatError("unknown attribute kind '" + kind + "'");
    }
    s.attributes.push_back(std::move(attr));
  }
  s.label_name = j.at("label").get<std::string>();
  s.label_names = j.at("label_names").get<std::vector<std::string>>();
  if (s.label_names.size() < 2) throw FormatError("schema needs at least two labels");
  return s;
}

json config_json(const ConfigRecord& config) {
  json out = json::array();
  for (const auto& [k, v] : config) out.push_back({k, v});
  return out;
}

ConfigRecord parse_config(const json& j) {
  ConfigRecord out;
  for (const auto& pair : j) {
    out.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
  }
  return out;
}

json rule_json(const Rule& rule, const SchemaInfo& schema) {
  json lits = json::array();
  for (const auto& l : rule.literals()) {
    const auto& attr = schema.attributes.at(l.attribute);
    lits.push_back({{"attribute", attr.name}, {"category", attr.categories.at(l.category)}});
  }
  return lits;
}

Rule parse_rule(const json& j, const SchemaInfo& schema) {
  std::vector<Literal> lits;
  for (const auto& l : j) {
    const auto name = l.at("attribute").get<std::string>();
    const auto category = l.at("category").get<std::string>();
    std::uint32_t a = 0;
    while (a < schema.attributes.size() && schema.attributes[a].name != name) ++a;
    if (a == schema.attributes.size()) throw FormatError("unknown attribute '" + name + "'");
    const auto c = schema.attributes[a].find(category);
    if (!c) throw FormatError("unknown category '" + category + "' of attribute '" + name + "'");
    lits.push_back({a, *c});
  }
  try {
    return Rule(std::move(lits));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid rule: ") + e.what());
  }
}

LabelIndex parse_label(const json& j, const SchemaInfo& schema) {
  const auto name = j.get<std::string>();
  for (LabelIndex k = 0; k < schema.label_names.size(); ++k) {
    if (schema.label_names[k] == name) return k;
  }
  throw FormatError("unknown label '" + name + "'");
}

// JSON has no infinity; non-finite values are written as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double number_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json parse_document(std::string_view text, const char* format) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw FormatError(std::string(format) + " file is empty");
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(format) + " file is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != std::string("mcabrl-") + format) {
    throw FormatError(std::string("not a ") + format + " file");
  }
  if (doc.value("version", 0) != kFormatVersion) {
    throw FormatError(std::string("unsupported ") + format + " file version");
  }
  return doc;
}

template <typename Fn>
auto guarded(const char* format, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed ") + format + " file: " + e.what());
  }
}

std::string literal_text(const Literal& l, const SchemaInfo& schema) {
  const auto& attr = schema.attributes.at(l.attribute);
  return attr.name + " is " + attr.categories.at(l.category);
}

}  // namespace

SchemaInfo SchemaInfo::of(const CategoricalDataset& dataset) {
  return {dataset.schemas(), dataset.label_name(), dataset.label_names()};
}

std::string to_json(const RuleFile& file) {
  json rules = json::array();
  for (const auto& r : file.rules) {
    rules.push_back({{"literals", rule_json(r.rule, file.schema)},
                     {"label", file.schema.label_names.at(r.label)},
                     {"score", r.score},
                     {"support", r.support}});
  }
  const json doc = {{"format", "mcabrl-rules"},
                    {"version", kFormatVersion},
                    {"algorithm", file.algorithm},
                    {"status", to_string(file.status)},
                    {"config", config_json(file.config)},
                    {"schema", schema_json(file.schema)},
                    {"rules", std::move(rules)}};
  return doc.dump(2) + "\n";
}

RuleFile parse_rule_file(std::string_view text) {
  const json doc = parse_document(text, "rules");
  return guarded("rules", [&] {
    RuleFile file;
    file.schema = parse_schema(doc.at("schema"));
    file.algorithm = doc.at("algorithm").get<std::string>();
    const auto status = doc.at("status").get<std::string>();
    if (status == to_string(MineStatus::kEmpty)) {
      file.status = MineStatus::kEmpty;
    } else if (status == to_string(MineStatus::kBudgetExceeded)) {
      file.status = MineStatus::kBudgetExceeded;
    }
    file.config = parse_config(doc.at("config"));
    for (const auto& r : doc.at("rules")) {
      file.rules.push_back({parse_rule(r.at("literals"), file.schema),
                            parse_label(r.at("label"), file.schema), r.at("score").get<double>(),
                            r.at("support").get<double>()});
    }
    return file;
  });
}

std::string to_json(const ModelFile& file) {
  const auto& m = file.model;
  json clauses = json::array();
  for (std::size_t j = 0; j <= m.rules.size(); ++j) {
    const auto p = m.clause_probabilities(j);
    const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    json clause = {{"rule", j < m.rules.size() ? rule_json(m.rules[j], file.schema) : json(nullptr)},
                   {"counts", m.counts.at(j)},
                   {"probabilities", p},
                   {"prediction", file.schema.label_names.at(best)}};
    clauses.push_back(std::move(clause));
  }
  const auto& d = file.diagnostics;
  json history = json::array();
  for (const auto& [it, rhat] : d.rhat_history) history.push_back({it, number_or_null(rhat)});
  const json doc = {
      {"format", "mcabrl-model"},
      {"version", kFormatVersion},
      {"config", config_json(file.config)},
      {"schema", schema_json(file.schema)},
      {"alpha", m.alpha},
      {"log_posterior", m.log_posterior},
      {"clauses", std::move(clauses)},
      {"diagnostics",
       {{"rhat_checked", d.rhat_checked},
        {"converged", d.converged},
        {"iterations", d.iterations},
        {"final_rhat", number_or_null(d.final_rhat)},
        {"rhat_history", std::move(history)},
        {"acceptance_rate", d.acceptance_rate},
        {"best_chain", d.best_chain},
        {"best_iteration", d.best_iteration}}}};
  return doc.dump(2) + "\n";
}

ModelFile parse_model_file(std::string_view text) {
  const json doc = parse_document(text, "model");
  return guarded("model", [&] {
    ModelFile file;
    file.schema = parse_schema(doc.at("schema"));
    file.config = parse_config(doc.at("config"));
    auto& m = file.model;
    m.alpha = doc.at("alpha").get<std::vector<double>>();
    if (m.alpha.size() != file.schema.label_names.size()) {
      throw FormatError("model alpha does not match the number of labels");
    }
    m.log_posterior = doc.at("log_posterior").get<double>();
    const auto& clauses = doc.at("clauses");
    if (!clauses.is_array() || clauses.empty()) throw FormatError("model has no clauses");
    for (std::size_t j = 0; j < clauses.size(); ++j) {
      const auto& c = clauses[j];
      const bool is_default = j + 1 == clauses.size();
      if (c.at("rule").is_null() != is_default) {
        throw FormatError("only the last clause may (and must) be the default");
      }
      if (!is_default) m.rules.push_back(parse_rule(c.at("rule"), file.schema));
      auto counts = c.at("counts").get<std::vector<std::size_t>>();
      if (counts.size() != m.alpha.size()) throw FormatError("clause counts have the wrong size");
      m.counts.push_back(std::move(counts));
    }
    const auto& d = doc.at("diagnostics");
    auto& diag = file.diagnostics;
    diag.rhat_checked = d.at("rhat_checked").get<bool>();
    diag.converged = d.at("converged").get<bool>();
    diag.iterations = d.at("iterations").get<std::size_t>();
    diag.final_rhat = number_or_inf(d.at("final_rhat"));
    for (const auto& h : d.at("rhat_history")) {
      diag.rhat_history.emplace_back(h.at(0).get<std::size_t>(), number_or_inf(h.at(1)));
    }
    diag.acceptance_rate = d.at("acceptance_rate").get<double>();
    diag.best_chain = d.at("best_chain").get<int>();
    diag.best_iteration = d.at("best_iteration").get<std::size_t>();
    return file;
  });
}

std::string render_rule_list(const FittedRuleList& model, const SchemaInfo& schema) {
  std::ostringstream out;
  auto outcome = [&](std::size_t clause) {
    const auto p = model.clause_probabilities(clause);
    const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    char prob[32];
    std::snprintf(prob, sizeof prob, "%.2f", p[best]);
    return schema.label_names.at(best) + " (P = " + prob + ")";
  };
  for (std::size_t j = 0; j < model.rules.size(); ++j) {
    out << (j == 0 ? "if " : "else if ");
    const auto& lits = model.rules[j].literals();
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (i > 0) out << " and ";
      out << literal_text(lits[i], schema);
    }
    out << " then " << outcome(j) << "\n";
  }
  out << (model.rules.empty() ? "always " : "else ") << outcome(model.rules.size()) << "\n";
  return out.str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw DataError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot move output into place at '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace mcabrl
