#include <gtest/gtest.h>

#include <algorithm>

#include "ksep/golden.hpp"

using namespace ksep;

TEST(AllTables, EnumeratesEveryTableOnce) {
  const auto ts = all_tables(3);
  EXPECT_EQ(ts.size(), 4u + 16u + 256u);
  EXPECT_EQ(ts[0].name(), "c1_00");
  EXPECT_EQ(ts[5].name(), "c2_0001");
}

TEST(Golden, ReproducesEveryPublishedTableUpToArityThree) {
  const auto rep = verify_reference_tables(3);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.connectives, 247u);
  for (const auto id : {"d1-classical", "d1-kripke", "d2-classical", "d2-kripke", "b1-kripke", "a-kripke"}) {
    auto it = std::find_if(rep.tables.begin(), rep.tables.end(), [&](const auto& c) { return c.id == id; });
    ASSERT_NE(it, rep.tables.end()) << id;
    EXPECT_GT(it->instances, 0u) << id;
    EXPECT_GT(it->cells, 0u) << id;
    EXPECT_TRUE(it->mismatches.empty()) << id << ": " << (it->mismatches.empty() ? "" : it->mismatches[0]);
  }
  for (const auto& c : rep.claims) EXPECT_TRUE(c.ok()) << c.id;
}

TEST(Golden, ReportsExactlyTheKnownDeviations) {
  const auto rep = verify_reference_tables(3);
  std::vector<std::string> ids;
  for (const auto& d : rep.deviations) {
    ids.push_back(d.id);
    EXPECT_TRUE(d.expected) << d.id;
    EXPECT_FALSE(d.printed.empty());
    EXPECT_FALSE(d.engine.empty());
  }
  std::sort(ids.begin(), ids.end());
  auto want = expected_deviation_ids();
  std::sort(want.begin(), want.end());
  EXPECT_EQ(ids, want);
  EXPECT_TRUE(rep.missing_deviations.empty());
}

// Binary connectives never reach subcase 1 of case (b), so the b1 table has
// no instance and the report cannot be complete.
TEST(Golden, ArityTwoLeavesASubcaseUncovered) {
  const auto rep = verify_reference_tables(2);
  EXPECT_FALSE(rep.ok());
  auto it = std::find_if(rep.tables.begin(), rep.tables.end(), [](const auto& c) { return c.id == "b1-kripke"; });
  ASSERT_NE(it, rep.tables.end());
  EXPECT_EQ(it->instances, 0u);
}
