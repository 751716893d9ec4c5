#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "hcran/assignment.hpp"

using namespace hcran;

namespace {

UtilityMatrix matrix(std::vector<std::vector<double>> rows) {
  UtilityMatrix U(rows.size(), rows.front().size());
  for (std::size_t z = 0; z < rows.size(); ++z)
    for (std::size_t m = 0; m < rows[z].size(); ++m) U(z, m) = rows[z][m];
  return U;
}

// Brute force over permutations of columns, independent of the library.
double brute_force_best(const UtilityMatrix& U) {
  const std::size_t Z = U.Z(), M = U.M();
  double best = 0.0;
  std::vector<std::size_t> pick(Z, M);
  auto rec = [&](auto&& self, std::size_t z, std::vector<char>& used, double acc) -> void {
    if (z == Z) {
      best = std::max(best, acc);
      return;
    }
    self(self, z + 1, used, acc);
    for (std::size_t m = 0; m < M; ++m) {
      if (used[m]) continue;
      used[m] = 1;
      self(self, z + 1, used, acc + U(z, m));
      used[m] = 0;
    }
  };
  std::vector<char> used(M, 0);
  rec(rec, 0, used, 0.0);
  return best;
}

}  // namespace

TEST(Assignment, TwoByTwoHandExample) {
  const UtilityMatrix U = matrix({{5, 1}, {2, 4}});
  const MatchResult r = stable_match(U);
  EXPECT_TRUE(r.x(0, 0));
  EXPECT_TRUE(r.x(1, 1));
  EXPECT_EQ(r.rounds, 2u);
  EXPECT_DOUBLE_EQ(total_utility(U, r.x), 9.0);
  EXPECT_FALSE(has_blocking_pair(U, r.x));
}

TEST(Assignment, GreedyDiffersFromStable) {
  // RRH 0 grabs MBS user 0 first; the stable rule serves the larger entry
  const UtilityMatrix U = matrix({{2, 3}, {1, 0.5}});
  const Assignment g = greedy_match(U);
  EXPECT_DOUBLE_EQ(total_utility(U, g), 2.5);
  const Assignment s = stable_match(U).x;
  EXPECT_DOUBLE_EQ(total_utility(U, s), 4.0);
  EXPECT_DOUBLE_EQ(total_utility(U, exhaustive_match(U)), 4.0);
  EXPECT_TRUE(has_blocking_pair(U, g));
}

TEST(Assignment, NonPositiveUtilitiesStayUnmatched) {
  const UtilityMatrix U = matrix({{-1, 0}, {-2, -INFINITY}});
  EXPECT_TRUE(stable_match(U).x.empty());
  EXPECT_TRUE(greedy_match(U).empty());
  EXPECT_TRUE(exhaustive_match(U).empty());
}

TEST(Assignment, TiesGoToLowerIndices) {
  const UtilityMatrix U = matrix({{1, 1}, {1, 1}});
  const Assignment x = stable_match(U).x;
  EXPECT_TRUE(x(0, 0));
  EXPECT_TRUE(x(1, 1));
}

TEST(Assignment, EnumerationCounts) {
  // partial one-to-one matchings: sum_k C(Z,k) C(M,k) k!
  EXPECT_EQ(enumerate_assignments(2, 2).size(), 7u);
  EXPECT_EQ(enumerate_assignments(3, 3).size(), 34u);
  EXPECT_EQ(enumerate_assignments(2, 3).size(), 13u);
  const auto all = enumerate_assignments(3, 2);
  EXPECT_TRUE(all.front().empty());
  std::set<std::vector<bool>> seen;
  for (const auto& x : all) {
    EXPECT_TRUE(x.is_one_to_one());
    std::vector<bool> key;
    for (std::size_t z = 0; z < 3; ++z)
      for (std::size_t m = 0; m < 2; ++m) key.push_back(x(z, m));
    seen.insert(key);
  }
  EXPECT_EQ(seen.size(), all.size());
}

TEST(Assignment, RandomInstancesAgainstBruteForce) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd(0.5, 1.0);
  std::uniform_int_distribution<std::size_t> size(1, 5);
  for (int i = 0; i < 300; ++i) {
    const std::size_t Z = size(rng), M = size(rng);
    UtilityMatrix U(Z, M);
    for (std::size_t z = 0; z < Z; ++z)
      for (std::size_t m = 0; m < M; ++m) U(z, m) = nd(rng);
    const MatchResult s = stable_match(U);
    const double best = brute_force_best(U);
    EXPECT_TRUE(s.x.is_one_to_one());
    EXPECT_LE(s.rounds, std::min(Z, M));
    EXPECT_FALSE(has_blocking_pair(U, s.x));
    EXPECT_NEAR(total_utility(U, exhaustive_match(U)), best, 1e-12);
    // the largest-entry-first rule keeps at least half of the optimum
    EXPECT_GE(total_utility(U, s.x), 0.5 * best - 1e-12);
  }
}

TEST(Assignment, OneToOneChecks) {
  Assignment x(2, 2);
  x.set(0, 0, true);
  x.set(1, 0, true);
  EXPECT_FALSE(x.is_one_to_one());
  x.set(1, 0, false);
  x.set(1, 1, true);
  EXPECT_TRUE(x.is_one_to_one());
  EXPECT_EQ(x.rrh_of(1), 1u);
  EXPECT_EQ(Assignment(2, 3).rrh_of(0), 3u);
  EXPECT_EQ(x.pair_count(), 2u);
}
