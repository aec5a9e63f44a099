#pragma once

// Farm panel schema and ingestion: per farm-year economic records, the
// covariate schema that declares each column's kind (numeric, categorical,
// currency), and price-index deflation of every currency-kind field.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "istrate/common.hpp"
#include "istrate/csv.hpp"

namespace istrate {

enum class CovariateKind { Numeric, Categorical, Currency };

// Which lagged transforms a numeric/currency column contributes to the
// feature rows: level at t-1, mean and standard deviation over t-3..t-1.
struct TransformSet {
  bool l1 = true;
  bool avg = false;
  bool sd = false;
};

struct CovariateSpec {
  CovariateKind kind = CovariateKind::Numeric;
  TransformSet transforms;
};

struct PanelSchema {
  std::map<std::string, CovariateSpec> covariates;  // name -> spec
  TransformSet value_added_transforms{true, true, true};

  bool has(const std::string& name) const {
    return covariates.count(name) > 0;
  }
};

struct FarmYearRecord {
  std::string farm_id;
  int year = 0;
  double value_added = 0.0;  // deflated EUR per farm once deflate() ran
  std::map<std::string, double> numeric_covariates;  // numeric + currency
  std::map<std::string, std::string> categorical_covariates;
};

class Panel {
 public:
  Panel() = default;
  Panel(std::vector<FarmYearRecord> records, PanelSchema schema)
      : records_(std::move(records)), schema_(std::move(schema)) {
    sort_and_index();
  }

  const std::vector<FarmYearRecord>& records() const { return records_; }
  const PanelSchema& schema() const { return schema_; }
  size_t size() const { return records_.size(); }

  const FarmYearRecord* find(const std::string& farm_id, int year) const {
    auto it = index_.find(key(farm_id, year));
    return it == index_.end() ? nullptr : &records_[it->second];
  }

  std::vector<int> years() const {
    std::set<int> ys;
    for (const auto& r : records_) ys.insert(r.year);
    return {ys.begin(), ys.end()};
  }

  std::vector<std::string> farm_ids() const {
    std::set<std::string> ids;
    for (const auto& r : records_) ids.insert(r.farm_id);
    return {ids.begin(), ids.end()};
  }

 private:
  static std::string key(const std::string& farm_id, int year) {
    return farm_id + "\x1f" + std::to_string(year);
  }

  void sort_and_index() {
    std::sort(records_.begin(), records_.end(),
              [](const FarmYearRecord& a, const FarmYearRecord& b) {
                return a.farm_id != b.farm_id ? a.farm_id < b.farm_id
                                              : a.year < b.year;
              });
    index_.clear();
    for (size_t i = 0; i < records_.size(); ++i) {
      auto [it, inserted] =
          index_.emplace(key(records_[i].farm_id, records_[i].year), i);
      if (!inserted)
        throw DataError("integrity error: duplicate (farm_id=" +
                        records_[i].farm_id +
                        ", year=" + std::to_string(records_[i].year) + ")");
    }
  }

  std::vector<FarmYearRecord> records_;
  PanelSchema schema_;
  std::map<std::string, size_t> index_;
};

struct PriceIndex {
  std::map<int, double> deflator;  // year -> deflator, base year = 1

  double at(int year) const {
    auto it = deflator.find(year);
    if (it == deflator.end())
      throw DataError("coverage error: price index has no entry for year " +
                      std::to_string(year));
    return it->second;
  }

  void validate() const {
    for (const auto& [year, d] : deflator)
      if (!(d > 0.0))
        throw DataError("price index deflator must be positive (year " +
                        std::to_string(year) + ")");
  }
};

// ---------------------------------------------------------------------------
// Loading

inline TransformSet parse_transforms(const nlohmann::json& arr,
                                     const std::string& where) {
  TransformSet t{false, false, false};
  for (const auto& e : arr) {
    const std::string s = e.get<std::string>();
    if (s == "L1")
      t.l1 = true;
    else if (s == "AVG")
      t.avg = true;
    else if (s == "SD")
      t.sd = true;
    else
      throw DataError("schema error: unknown transform '" + s + "' in " +
                      where);
  }
  return t;
}

inline PanelSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema error: invalid JSON in " + path + ": " + e.what());
  }
  PanelSchema schema;
  if (j.contains("value_added") && j["value_added"].contains("transforms"))
    schema.value_added_transforms =
        parse_transforms(j["value_added"]["transforms"], "value_added");
  if (!j.contains("covariates"))
    throw DataError("schema error: missing 'covariates' object in " + path);
  for (const auto& [name, spec] : j["covariates"].items()) {
    CovariateSpec cs;
    const std::string kind = spec.value("kind", "numeric");
    if (kind == "numeric")
      cs.kind = CovariateKind::Numeric;
    else if (kind == "categorical")
      cs.kind = CovariateKind::Categorical;
    else if (kind == "currency")
      cs.kind = CovariateKind::Currency;
    else
      throw DataError("schema error: unknown kind '" + kind +
                      "' for covariate " + name);
    if (spec.contains("transforms")) {
      if (cs.kind == CovariateKind::Categorical)
        throw DataError("schema error: transforms not allowed on categorical " +
                        name);
      cs.transforms = parse_transforms(spec["transforms"], name);
    }
    schema.covariates.emplace(name, cs);
  }
  return schema;
}

// CSV with header `farm_id,year,value_added,<covariates per schema>`.
// Every schema covariate must appear; no undeclared columns are accepted.
inline Panel load_panel(const std::string& path, const PanelSchema& schema) {
  const CsvTable t = read_csv(path);

  const int c_farm = t.column("farm_id");
  const int c_year = t.column("year");
  const int c_va = t.column("value_added");
  if (c_farm < 0 || c_year < 0 || c_va < 0)
    throw DataError("schema error: panel CSV must have columns "
                    "farm_id, year, value_added (" + path + ")");

  std::map<std::string, int> cov_col;
  for (size_t j = 0; j < t.header.size(); ++j) {
    const std::string& h = t.header[j];
    if (h == "farm_id" || h == "year" || h == "value_added") continue;
    if (!schema.has(h))
      throw DataError("schema error: column '" + h +
                      "' is not declared in the schema");
    cov_col[h] = static_cast<int>(j);
  }
  for (const auto& [name, spec] : schema.covariates)
    if (!cov_col.count(name))
      throw DataError("schema error: covariate '" + name +
                      "' declared in schema but missing from " + path);

  std::vector<FarmYearRecord> records;
  records.reserve(t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const auto& cells = t.rows[i];
    const size_t line = t.line_numbers[i];
    FarmYearRecord r;
    r.farm_id = cells[c_farm];
    if (r.farm_id.empty())
      throw DataError("parse error at line " + std::to_string(line) +
                      ": empty farm_id");
    r.year = static_cast<int>(parse_int_cell(cells[c_year], line, "year"));
    r.value_added = parse_double_cell(cells[c_va], line, "value_added");
    for (const auto& [name, col] : cov_col) {
      const CovariateSpec& spec = schema.covariates.at(name);
      if (spec.kind == CovariateKind::Categorical) {
        if (cells[col].empty())
          throw DataError("parse error at line " + std::to_string(line) +
                          ": empty value in column '" + name + "'");
        r.categorical_covariates[name] = cells[col];
      } else {
        r.numeric_covariates[name] = parse_double_cell(cells[col], line, name);
      }
    }
    records.push_back(std::move(r));
  }
  return Panel(std::move(records), schema);
}

inline PriceIndex load_price_index(const std::string& path) {
  const CsvTable t = read_csv(path);
  const int c_year = t.column("year");
  const int c_def = t.column("deflator");
  if (c_year < 0 || c_def < 0)
    throw DataError("schema error: price index CSV must have columns "
                    "year, deflator");
  PriceIndex idx;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const size_t line = t.line_numbers[i];
    const int year =
        static_cast<int>(parse_int_cell(t.rows[i][c_year], line, "year"));
    idx.deflator[year] = parse_double_cell(t.rows[i][c_def], line, "deflator");
  }
  idx.validate();
  return idx;
}

// Divides value_added and every currency-kind covariate by the year's
// deflator. Non-currency fields pass through untouched.
inline Panel deflate(const Panel& panel, const PriceIndex& index) {
  index.validate();
  for (int year : panel.years()) index.at(year);  // coverage check up front

  std::vector<FarmYearRecord> out;
  out.reserve(panel.size());
  for (const auto& r : panel.records()) {
    FarmYearRecord d = r;
    const double defl = index.at(r.year);
    d.value_added = r.value_added / defl;
    for (auto& [name, value] : d.numeric_covariates)
      if (panel.schema().covariates.at(name).kind == CovariateKind::Currency)
        value /= defl;
    out.push_back(std::move(d));
  }
  return Panel(std::move(out), panel.schema());
}

inline void write_panel_csv(const Panel& panel, const std::string& path) {
  std::vector<std::string> cov_names;
  for (const auto& [name, spec] : panel.schema().covariates)
    cov_names.push_back(name);

  CsvWriter w(path);
  std::vector<std::string> header{"farm_id", "year", "value_added"};
  header.insert(header.end(), cov_names.begin(), cov_names.end());
  w.row(header);
  for (const auto& r : panel.records()) {
    std::vector<std::string> cells{r.farm_id, std::to_string(r.year),
                                   num_csv(r.value_added)};
    for (const auto& name : cov_names) {
      if (panel.schema().covariates.at(name).kind == CovariateKind::Categorical)
        cells.push_back(r.categorical_covariates.at(name));
      else
        cells.push_back(num_csv(r.numeric_covariates.at(name)));
    }
    w.row(cells);
  }
}

}  // namespace istrate
