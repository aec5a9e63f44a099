#include "istrate/ist.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

istrate::Panel income_panel(
    const std::vector<std::pair<std::string, std::vector<std::pair<int, double>>>>&
        farms) {
  std::vector<istrate::FarmYearRecord> records;
  for (const auto& [farm, series] : farms)
    for (const auto& [year, va] : series) {
      istrate::FarmYearRecord r;
      r.farm_id = farm;
      r.year = year;
      r.value_added = va;
      records.push_back(std::move(r));
    }
  return istrate::Panel(std::move(records), istrate::PanelSchema{});
}

}  // namespace

TEST(ExpectedIncome, ArithmeticMean) {
  EXPECT_DOUBLE_EQ(istrate::expected_income({100, 120, 140}), 120.0);
  EXPECT_DOUBLE_EQ(istrate::expected_income({42, 42, 42}), 42.0);
  EXPECT_DOUBLE_EQ(istrate::expected_income({-50, 100, 100}), 50.0);
  EXPECT_THROW(istrate::expected_income({1, 2}), istrate::DataError);
}

TEST(Indemnity, BranchValues) {
  const istrate::IstParams params;
  EXPECT_DOUBLE_EQ(istrate::indemnity(90, 120, params), 0.0);   // above trigger
  EXPECT_DOUBLE_EQ(istrate::indemnity(50, 120, params), 49.0);  // 0.7*(120-50)
  EXPECT_DOUBLE_EQ(istrate::indemnity(-10, 100, params), 77.0); // negative income
  // A tie with the trigger pays nothing.
  EXPECT_DOUBLE_EQ(istrate::indemnity(84, 120, params), 0.0);
  EXPECT_THROW(istrate::indemnity(10, 0.0, params), istrate::DataError);
}

TEST(Indemnity, BranchAndJumpProperties) {
  const istrate::IstParams params;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ue(10.0, 1000.0), ui(-200.0, 1200.0);
  for (int i = 0; i < 5000; ++i) {
    const double expected = ue(rng), income = ui(rng);
    const double ind = istrate::indemnity(income, expected, params);
    const bool below = income < params.trigger_share * expected;
    EXPECT_EQ(ind > 0.0, below);
    if (ind > 0.0) {
      // Every positive payment strictly exceeds b*(1-a)*expected.
      EXPECT_GT(ind, params.compensation_share *
                         (1.0 - params.trigger_share) * expected);
    }
  }
}

TEST(Indemnity, MonotoneNonIncreasingInIncome) {
  const istrate::IstParams params;
  const double expected = 250.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double income = -100.0; income <= 300.0; income += 1.0) {
    const double ind = istrate::indemnity(income, expected, params);
    EXPECT_LE(ind, prev);
    prev = ind;
  }
}

TEST(SimulatePanel, FlatIncomeProducesZeroIndemnities) {
  const auto panel = income_panel({{"1",
                                    {{2008, 100},
                                     {2009, 100},
                                     {2010, 100},
                                     {2011, 100},
                                     {2012, 100}}}});
  const auto table = istrate::simulate_panel(panel, {});
  ASSERT_EQ(table.size(), 2u);  // 2011 and 2012
  for (const auto& r : table.records()) {
    EXPECT_DOUBLE_EQ(r.expected_income, 100.0);
    EXPECT_DOUBLE_EQ(r.indemnity, 0.0);
  }
}

TEST(SimulatePanel, DropYearPaysHandComputedIndemnity) {
  const auto panel = income_panel(
      {{"1", {{2008, 100}, {2009, 100}, {2010, 100}, {2011, 50}}}});
  const auto table = istrate::simulate_panel(panel, {});
  ASSERT_EQ(table.size(), 1u);
  const auto& r = table.records()[0];
  EXPECT_EQ(r.year, 2011);
  EXPECT_DOUBLE_EQ(r.expected_income, 100.0);
  EXPECT_DOUBLE_EQ(r.trigger, 70.0);
  EXPECT_DOUBLE_EQ(r.indemnity, 35.0);
}

TEST(SimulatePanel, NonpositiveExpectedIncomeExcluded) {
  const auto panel = income_panel(
      {{"1", {{2008, -100}, {2009, 0}, {2010, 100}, {2011, 50}}},
       {"2", {{2008, 100}, {2009, 100}, {2010, 100}, {2011, 80}}}});
  const auto table = istrate::simulate_panel(panel, {});
  ASSERT_EQ(table.size(), 1u);
  EXPECT_EQ(table.records()[0].farm_id, "2");
}

TEST(SimulatePanel, GapBreaksEligibility) {
  const auto panel = income_panel(
      {{"1", {{2008, 100}, {2010, 100}, {2011, 100}, {2012, 100}}}});
  // 2011 and 2012 lack a contiguous 3-year history; 2013 not observed.
  EXPECT_THROW(istrate::simulate_panel(panel, {}), istrate::DataError);
}

TEST(SimulatePanel, OrderInvariant) {
  std::vector<std::pair<int, double>> series{
      {2008, 90}, {2009, 120}, {2010, 110}, {2011, 60}, {2012, 130}};
  const auto forward = income_panel({{"1", series}, {"2", series}});
  std::reverse(series.begin(), series.end());
  const auto backward = income_panel({{"2", series}, {"1", series}});
  const auto ta = istrate::simulate_panel(forward, {});
  const auto tb = istrate::simulate_panel(backward, {});
  ASSERT_EQ(ta.size(), tb.size());
  for (size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta.records()[i].farm_id, tb.records()[i].farm_id);
    EXPECT_EQ(ta.records()[i].year, tb.records()[i].year);
    EXPECT_DOUBLE_EQ(ta.records()[i].indemnity, tb.records()[i].indemnity);
  }
}

TEST(IndemnitySummary, HandComputedMoments) {
  std::vector<istrate::IndemnityRecord> recs;
  for (double v : {0.0, 0.0, 10.0, 30.0}) {
    istrate::IndemnityRecord r;
    r.farm_id = "f" + std::to_string(recs.size());
    r.year = 2011;
    r.indemnity = v;
    r.expected_income = 100.0;
    recs.push_back(r);
  }
  const auto s = istrate::indemnity_summary(istrate::IndemnityTable(recs));
  EXPECT_EQ(s.full.n, 4u);
  EXPECT_DOUBLE_EQ(s.full.mean, 10.0);
  EXPECT_EQ(s.positive.n, 2u);
  EXPECT_DOUBLE_EQ(s.positive.mean, 20.0);
  ASSERT_TRUE(s.min_positive.has_value());
  EXPECT_DOUBLE_EQ(*s.min_positive, 10.0);
}

TEST(IndemnitySummary, AllZeroHasNoMinPositive) {
  std::vector<istrate::IndemnityRecord> recs(3);
  for (size_t i = 0; i < recs.size(); ++i) {
    recs[i].farm_id = "f" + std::to_string(i);
    recs[i].year = 2011;
    recs[i].indemnity = 0.0;
  }
  const auto s = istrate::indemnity_summary(istrate::IndemnityTable(recs));
  EXPECT_DOUBLE_EQ(s.full.mean, 0.0);
  EXPECT_EQ(s.positive.n, 0u);
  EXPECT_FALSE(s.min_positive.has_value());
}
