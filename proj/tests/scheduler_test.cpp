#include <gtest/gtest.h>

#include "scalowork/scheduler.hpp"

using namespace scalowork;

TEST(Lookup, SingleRowMultiplier) {
  LookupTable t({{1000, 5000, 60000}}, 1.5);
  EXPECT_EQ(estimate_tmax(t, 1000, 5000), 90000);
}

TEST(Lookup, WorkedScalingExample) {
  LookupTable t({{1000, 5000, 60000}}, 1.0);
  EXPECT_EQ(estimate_tmax(t, 2000, 10000), 240000);
}

TEST(Lookup, RowSelection) {
  LookupTable t({{2000, 10000, 100}, {1000, 5000, 60000}, {4000, 30000, 7}}, 1.0);
  EXPECT_EQ(t.rows().front().n, 1000u);
  EXPECT_EQ(t.rows().back().n, 4000u);
  EXPECT_EQ(t.select(1500).n, 1000u);
  EXPECT_EQ(t.select(2000).n, 2000u);
  EXPECT_EQ(t.select(500).n, 1000u);  // below every row
  EXPECT_EQ(t.select(99999).n, 4000u);
  // 60000 · (1500·7500) / (1000·5000) = 135000
  EXPECT_EQ(estimate_tmax(t, 1500, 7500), 135000);
}

TEST(Lookup, RoundsUp) {
  LookupTable t({{3, 3, 1}}, 1.0);
  EXPECT_EQ(estimate_tmax(t, 4, 4), 2);  // 16/9
}

TEST(Lookup, MonotoneInWork) {
  LookupTable t({{1000, 5000, 60000}}, 1.5);
  std::int64_t last = 0;
  for (std::uint64_t m = 1000; m <= 20000; m += 1000) {
    const auto v = estimate_tmax(t, 1200, m);
    EXPECT_GE(v, last);
    last = v;
  }
}

TEST(Lookup, Validation) {
  EXPECT_THROW(LookupTable({{10, 10, 5}}, 0.9), ParameterError);
  EXPECT_THROW(LookupTable({{10, 10, 0}}, 1.5), ParameterError);
  EXPECT_THROW(LookupTable({{0, 10, 5}}, 1.5), ParameterError);
  EXPECT_THROW(estimate_tmax(LookupTable({}, 1.5), 10, 10), ParameterError);
}

TEST(Lookup, CsvRoundTrip) {
  LookupTable t({{2000, 10000, 100}, {1000, 5000, 60000}}, 1.5);
  EXPECT_EQ(t.to_csv(), "n,m,tau_ms\n1000,5000,60000\n2000,10000,100\n");
  auto back = LookupTable::from_csv(t.to_csv(), 1.5);
  EXPECT_EQ(back.rows(), t.rows());
  try {
    LookupTable::from_csv("n,m,tau_ms\n1,2,3\n4;5;6\n", 1.5);
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), 3u);
  }
}

TEST(Build, RowsSortedAndFailuresSkipped) {
  std::vector<Graph> instances{generate_ba(300, 2, 1), generate_ba(100, 2, 2), generate_ba(200, 2, 3)};
  InstanceTimer timer = [](const Graph& g, unsigned) -> std::int64_t {
    if (g.vertex_count() == 200) throw ValidationError("solver failed");
    return static_cast<std::int64_t>(g.vertex_count());
  };
  auto built = build_lookup(instances, 2, 1.5, timer);
  ASSERT_EQ(built.table.rows().size(), 2u);
  EXPECT_EQ(built.table.rows()[0].n, 100u);
  EXPECT_EQ(built.table.rows()[1].tau_ms, 300);
  ASSERT_EQ(built.warnings.size(), 1u);
  EXPECT_NE(built.warnings[0].find("instance 2"), std::string::npos);
  EXPECT_THROW(build_lookup({}, 1), ParameterError);
}

TEST(Build, WallClockRerunWithinTolerance) {
  // Timing check: large enough that one run takes tens of milliseconds.
  std::vector<Graph> instances{generate_ba(60000, 5, 4)};
  auto a = build_lookup(instances, 2).table.rows()[0].tau_ms;
  auto b = build_lookup(instances, 2).table.rows()[0].tau_ms;
  EXPECT_GT(a, 0);
  EXPECT_LE(std::max(a, b), 2 * std::min(a, b) + 5);
}
