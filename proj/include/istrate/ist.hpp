#pragma once

// Income Stabilization Tool indemnity simulation. For each eligible
// farm-year the scheme pays b * (expected - realized) when realized income
// falls below the trigger a * expected, where expected income is the
// arithmetic mean of the previous three years. Eligibility requires that
// full three-year history and a strictly positive expected income.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "istrate/common.hpp"
#include "istrate/csv.hpp"
#include "istrate/panel.hpp"

namespace istrate {

struct IstParams {
  double trigger_share = 0.7;       // a
  double compensation_share = 0.7;  // b
  static constexpr int window = 3;  // reference years

  void validate() const {
    if (!(trigger_share > 0.0 && trigger_share < 1.0))
      throw ConfigError("IST trigger share must lie in (0, 1)");
    if (!(compensation_share > 0.0 && compensation_share <= 1.0))
      throw ConfigError("IST compensation share must lie in (0, 1]");
  }
};

struct IndemnityRecord {
  std::string farm_id;
  int year = 0;
  double income = 0.0;           // realized, year t
  double expected_income = 0.0;  // mean of t-3..t-1
  double trigger = 0.0;          // a * expected
  double indemnity = 0.0;        // >= 0
};

class IndemnityTable {
 public:
  IndemnityTable() = default;
  explicit IndemnityTable(std::vector<IndemnityRecord> records)
      : records_(std::move(records)) {
    std::sort(records_.begin(), records_.end(),
              [](const IndemnityRecord& a, const IndemnityRecord& b) {
                return a.farm_id != b.farm_id ? a.farm_id < b.farm_id
                                              : a.year < b.year;
              });
    for (size_t i = 0; i < records_.size(); ++i)
      index_.emplace(records_[i].farm_id + "\x1f" +
                         std::to_string(records_[i].year),
                     i);
  }

  const std::vector<IndemnityRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }

  const IndemnityRecord* find(const std::string& farm_id, int year) const {
    auto it = index_.find(farm_id + "\x1f" + std::to_string(year));
    return it == index_.end() ? nullptr : &records_[it->second];
  }

 private:
  std::vector<IndemnityRecord> records_;
  std::map<std::string, size_t> index_;
};

struct MomentSet {
  size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double skewness = 0.0;  // m3 / m2^1.5
  double kurtosis = 0.0;  // m4 / m2^2, non-excess
};

struct IndemnitySummary {
  MomentSet full;
  MomentSet positive;
  std::optional<double> min_positive;
};

// Arithmetic mean of the three reference-year incomes.
inline double expected_income(const std::vector<double>& history) {
  if (history.size() != IstParams::window)
    throw DataError("window error: expected income needs exactly 3 years, got " +
                    std::to_string(history.size()));
  for (double v : history)
    if (!std::isfinite(v)) throw DataError("window error: non-finite income");
  return (history[0] + history[1] + history[2]) / 3.0;
}

// Indemnity for one farm-year. Zero on income >= trigger (ties pay nothing),
// otherwise b * (expected - income).
inline double indemnity(double income, double expected,
                        const IstParams& params) {
  params.validate();
  if (!(expected > 0.0))
    throw DataError("eligibility error: expected income must be positive");
  const double trigger = params.trigger_share * expected;
  if (income >= trigger) return 0.0;
  return params.compensation_share * (expected - income);
}

// One record per (farm, t) with years t-3..t-1 present and positive expected
// income; earliest possible t is the first panel year + 3.
inline IndemnityTable simulate_panel(const Panel& panel,
                                     const IstParams& params) {
  params.validate();
  std::vector<IndemnityRecord> out;
  for (const auto& r : panel.records()) {
    const int t = r.year;
    const FarmYearRecord* h1 = panel.find(r.farm_id, t - 1);
    const FarmYearRecord* h2 = panel.find(r.farm_id, t - 2);
    const FarmYearRecord* h3 = panel.find(r.farm_id, t - 3);
    if (!h1 || !h2 || !h3) continue;
    const double expected =
        expected_income({h3->value_added, h2->value_added, h1->value_added});
    if (!(expected > 0.0)) continue;  // negative reference incomes excluded
    IndemnityRecord rec;
    rec.farm_id = r.farm_id;
    rec.year = t;
    rec.income = r.value_added;
    rec.expected_income = expected;
    rec.trigger = params.trigger_share * expected;
    rec.indemnity = indemnity(r.value_added, expected, params);
    out.push_back(std::move(rec));
  }
  if (out.empty())
    throw DataError(
        "emptiness error: no farm has the four consecutive years needed "
        "for an indemnity record");
  return IndemnityTable(std::move(out));
}

namespace detail {
inline MomentSet moments(const std::vector<double>& v) {
  MomentSet m;
  m.n = v.size();
  if (v.empty()) return m;
  m.mean = mean_of(v);
  m.sd = sd_sample(v);
  m.median = median_of(v);
  m.min = *std::min_element(v.begin(), v.end());
  m.max = *std::max_element(v.begin(), v.end());
  const double m2 = central_moment(v, 2);
  if (m2 > 0.0) {
    m.skewness = central_moment(v, 3) / std::pow(m2, 1.5);
    m.kurtosis = central_moment(v, 4) / (m2 * m2);
  }
  return m;
}
}  // namespace detail

inline IndemnitySummary indemnity_summary(const IndemnityTable& table) {
  if (table.records().empty())
    throw DataError("emptiness error: indemnity table is empty");
  std::vector<double> all, pos;
  for (const auto& r : table.records()) {
    all.push_back(r.indemnity);
    if (r.indemnity > 0.0) pos.push_back(r.indemnity);
  }
  IndemnitySummary s;
  s.full = detail::moments(all);
  s.positive = detail::moments(pos);
  if (!pos.empty()) s.min_positive = *std::min_element(pos.begin(), pos.end());
  return s;
}

inline void write_indemnity_csv(const IndemnityTable& table,
                                const std::string& path) {
  CsvWriter w(path);
  w.row({"farm_id", "year", "income", "expected_income", "trigger",
         "indemnity"});
  for (const auto& r : table.records())
    w.row({r.farm_id, std::to_string(r.year), num_csv(r.income),
           num_csv(r.expected_income), num_csv(r.trigger),
           num_csv(r.indemnity)});
}

inline void write_indemnity_summary_csv(const IndemnitySummary& s,
                                        const std::string& path) {
  CsvWriter w(path);
  w.row({"subset", "n", "mean", "sd", "median", "min", "max", "skewness",
         "kurtosis", "min_positive"});
  const auto line = [&](const char* name, const MomentSet& m) {
    w.row({name, std::to_string(m.n), num_csv(m.mean), num_csv(m.sd),
           num_csv(m.median), num_csv(m.min), num_csv(m.max),
           num_csv(m.skewness), num_csv(m.kurtosis),
           s.min_positive ? num_csv(*s.min_positive) : ""});
  };
  line("full", s.full);
  line("positive_only", s.positive);
}

}  // namespace istrate
