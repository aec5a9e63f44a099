#pragma once

// Lagged feature construction and design-matrix standardization.
//
// For a farm-year (i, t) the regressors use only information up to t-1:
// levels at t-1 (suffix _L1), three-year means (_AVG) and population
// standard deviations (_sd) over t-3..t-1, and 0/1 dummies from the
// categorical value at t-1. Multi-level categoricals are encoded as k-1
// dummies against the lexicographically first label and share one group id,
// so penalized fits select them all-or-none. Numeric columns are singleton
// groups.

#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "istrate/common.hpp"
#include "istrate/ist.hpp"
#include "istrate/panel.hpp"

namespace istrate {

struct RowId {
  std::string farm_id;
  int year = 0;

  std::string key() const { return farm_id + "\x1f" + std::to_string(year); }
  bool operator==(const RowId&) const = default;
};

struct FeatureRow {
  RowId id;                       // (farm, target year t)
  double response = 0.0;          // indemnity at t, >= 0
  std::vector<double> features;   // aligned with FeatureSpace columns
  int max_source_year = 0;        // newest year any feature touched (audit)
};

struct FeatureSpace {
  std::vector<std::string> column_names;
  std::vector<int> group_of;             // per column
  std::vector<bool> is_dummy;            // per column
  std::vector<std::string> group_names;  // group id -> base variable
  // categorical -> (reference level, ordered non-reference levels)
  std::map<std::string, std::vector<std::string>> categorical_levels;
  std::map<std::string, std::string> reference_levels;

  size_t n_columns() const { return column_names.size(); }
  size_t n_groups() const { return group_names.size(); }
};

struct FeatureDataset {
  FeatureSpace space;
  std::vector<FeatureRow> rows;
};

// ---------------------------------------------------------------------------
// Row construction

namespace detail {

inline void add_column(FeatureSpace& space, const std::string& name,
                       int group, bool dummy) {
  space.column_names.push_back(name);
  space.group_of.push_back(group);
  space.is_dummy.push_back(dummy);
}

}  // namespace detail

// A FeatureRow exists for (i, t) iff an indemnity record exists at (i, t)
// (which already implies the contiguous t-3..t-1 income history) and the
// covariate history needed by the declared transforms is present. A gap in
// the window drops the row.
inline FeatureDataset build_feature_rows(const Panel& panel,
                                         const IndemnityTable& indemnities) {
  const PanelSchema& schema = panel.schema();

  // Column layout. Numeric transforms first (value_added, then covariates in
  // schema order), then dummy families. One group per base variable.
  FeatureSpace space;
  int group = 0;
  const auto add_numeric = [&](const std::string& base, const TransformSet& t) {
    bool any = false;
    if (t.l1) { detail::add_column(space, base + "_L1", group, false); any = true; }
    if (t.avg) { detail::add_column(space, base + "_AVG", group, false); any = true; }
    if (t.sd) { detail::add_column(space, base + "_sd", group, false); any = true; }
    if (any) space.group_names.push_back(base), ++group;
  };
  add_numeric("VA", schema.value_added_transforms);
  for (const auto& [name, spec] : schema.covariates)
    if (spec.kind != CovariateKind::Categorical)
      add_numeric(name, spec.transforms);

  // Observed level sets, fixed over the whole panel before any split.
  for (const auto& [name, spec] : schema.covariates) {
    if (spec.kind != CovariateKind::Categorical) continue;
    std::set<std::string> levels;
    for (const auto& r : panel.records())
      levels.insert(r.categorical_covariates.at(name));
    if (levels.size() < 2)
      continue;  // single-level categorical carries no contrast
    std::vector<std::string> ordered(levels.begin(), levels.end());
    space.reference_levels[name] = ordered.front();
    std::vector<std::string> non_ref(ordered.begin() + 1, ordered.end());
    space.categorical_levels[name] = non_ref;
    for (const auto& lv : non_ref)
      detail::add_column(space, name + "." + lv, group, true);
    space.group_names.push_back(name);
    ++group;
  }

  FeatureDataset ds;
  ds.space = space;
  for (const auto& rec : indemnities.records()) {
    const std::string& farm = rec.farm_id;
    const int t = rec.year;
    const FarmYearRecord* lag[3] = {panel.find(farm, t - 1),
                                    panel.find(farm, t - 2),
                                    panel.find(farm, t - 3)};
    if (!lag[0] || !lag[1] || !lag[2]) continue;  // mirrors eligibility

    FeatureRow row;
    row.id = {farm, t};
    row.response = rec.indemnity;
    row.max_source_year = t - 1;
    row.features.reserve(space.n_columns());

    const auto push_numeric = [&](const TransformSet& tr, auto getter) {
      const double v1 = getter(*lag[0]);
      const double v2 = getter(*lag[1]);
      const double v3 = getter(*lag[2]);
      if (tr.l1) row.features.push_back(v1);
      if (tr.avg) row.features.push_back((v1 + v2 + v3) / 3.0);
      if (tr.sd) {
        const double m = (v1 + v2 + v3) / 3.0;
        const double var = ((v1 - m) * (v1 - m) + (v2 - m) * (v2 - m) +
                            (v3 - m) * (v3 - m)) / 3.0;
        row.features.push_back(std::sqrt(var));
      }
    };

    push_numeric(schema.value_added_transforms,
                 [](const FarmYearRecord& r) { return r.value_added; });
    for (const auto& [name, spec] : schema.covariates)
      if (spec.kind != CovariateKind::Categorical)
        push_numeric(spec.transforms, [&name](const FarmYearRecord& r) {
          return r.numeric_covariates.at(name);
        });

    for (const auto& [name, non_ref] : space.categorical_levels) {
      const std::string& lv = lag[0]->categorical_covariates.at(name);
      for (const auto& candidate : non_ref)
        row.features.push_back(lv == candidate ? 1.0 : 0.0);
    }

    ds.rows.push_back(std::move(row));
  }

  if (ds.rows.empty())
    throw DataError("emptiness error: no farm-year has the history needed "
                    "to build feature rows");
  return ds;
}

// ---------------------------------------------------------------------------
// Standardized design matrix

struct FeatureMatrix {
  Eigen::MatrixXd x;   // n x (1 + k); column 0 is the intercept
  Eigen::VectorXd y;   // response
  std::vector<std::string> col_names;    // size 1 + k, [0] = "(Intercept)"
  std::vector<int> group_of;             // size 1 + k, [0] = -1
  std::vector<bool> is_dummy;            // size 1 + k
  std::vector<std::string> group_names;  // group id -> base variable
  std::vector<double> center, scale;     // size 1 + k, identity for dummies
  std::vector<RowId> row_ids;
  std::vector<std::string> dropped_columns;  // zero variance in training
  bool degenerate_response = false;          // constant response in training

  size_t n_rows() const { return static_cast<size_t>(x.rows()); }
  size_t n_cols() const { return static_cast<size_t>(x.cols()); }

  // Penalized group structure: column indices per group id.
  std::vector<std::vector<int>> group_columns() const {
    std::vector<std::vector<int>> g(group_names.size());
    for (size_t j = 1; j < group_of.size(); ++j)
      g[static_cast<size_t>(group_of[j])].push_back(static_cast<int>(j));
    return g;
  }

  FeatureMatrix select(const std::vector<int>& rows) const {
    FeatureMatrix out = *this;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    out.row_ids.clear();
    for (size_t i = 0; i < rows.size(); ++i) {
      out.x.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
      out.y(static_cast<Eigen::Index>(i)) = y(rows[i]);
      out.row_ids.push_back(row_ids[static_cast<size_t>(rows[i])]);
    }
    return out;
  }

  void require_compatible(const FeatureMatrix& other) const {
    if (other.col_names != col_names)
      throw DataError("schema error: design matrices have different columns");
  }
};

// Standardizes numeric columns to training mean 0 / population variance 1,
// passes dummies through unscaled, and applies the training transform to all
// rows. Training-constant columns are dropped and recorded.
inline FeatureMatrix standardize(const FeatureDataset& ds,
                                 const std::vector<int>& train_index) {
  if (train_index.empty())
    throw DataError("standardize requires a non-empty training index");
  const size_t n = ds.rows.size();
  const size_t k = ds.space.n_columns();
  for (int i : train_index)
    if (i < 0 || static_cast<size_t>(i) >= n)
      throw DataError("standardize: training index out of range");

  std::vector<double> mean(k, 0.0), sd(k, 0.0);
  for (size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (int i : train_index) s += ds.rows[static_cast<size_t>(i)].features[j];
    mean[j] = s / static_cast<double>(train_index.size());
    double ss = 0.0;
    for (int i : train_index) {
      const double d = ds.rows[static_cast<size_t>(i)].features[j] - mean[j];
      ss += d * d;
    }
    sd[j] = std::sqrt(ss / static_cast<double>(train_index.size()));
  }

  std::vector<int> keep;
  FeatureMatrix m;
  for (size_t j = 0; j < k; ++j) {
    const bool constant = sd[j] <= 0.0;
    if (constant) {
      m.dropped_columns.push_back(ds.space.column_names[j]);
      continue;
    }
    keep.push_back(static_cast<int>(j));
  }

  // Rebuild column metadata with compacted group ids.
  m.col_names.push_back("(Intercept)");
  m.group_of.push_back(-1);
  m.is_dummy.push_back(false);
  m.center.push_back(0.0);
  m.scale.push_back(1.0);
  std::map<int, int> group_remap;
  for (int j : keep) {
    const int old_g = ds.space.group_of[static_cast<size_t>(j)];
    auto [it, inserted] =
        group_remap.emplace(old_g, static_cast<int>(m.group_names.size()));
    if (inserted)
      m.group_names.push_back(ds.space.group_names[static_cast<size_t>(old_g)]);
    m.col_names.push_back(ds.space.column_names[static_cast<size_t>(j)]);
    m.group_of.push_back(it->second);
    const bool dummy = ds.space.is_dummy[static_cast<size_t>(j)];
    m.is_dummy.push_back(dummy);
    m.center.push_back(dummy ? 0.0 : mean[static_cast<size_t>(j)]);
    m.scale.push_back(dummy ? 1.0 : sd[static_cast<size_t>(j)]);
  }

  m.x.resize(static_cast<Eigen::Index>(n),
             static_cast<Eigen::Index>(keep.size() + 1));
  m.y.resize(static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) {
    m.x(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (size_t jj = 0; jj < keep.size(); ++jj) {
      const size_t j = static_cast<size_t>(keep[jj]);
      m.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj + 1)) =
          (ds.rows[i].features[j] - m.center[jj + 1]) / m.scale[jj + 1];
    }
    m.y(static_cast<Eigen::Index>(i)) = ds.rows[i].response;
    m.row_ids.push_back(ds.rows[i].id);
  }

  double ymin = ds.rows[static_cast<size_t>(train_index[0])].response;
  double ymax = ymin;
  for (int i : train_index) {
    const double yy = ds.rows[static_cast<size_t>(i)].response;
    ymin = std::min(ymin, yy);
    ymax = std::max(ymax, yy);
  }
  m.degenerate_response = (ymin == ymax);

  return m;
}

}  // namespace istrate
