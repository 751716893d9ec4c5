#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hcran/scenario.hpp"

using namespace hcran;

TEST(Scenario, NoiseDensityFromDbm) {
  // -102 dBm over 700 kHz
  const double expected = std::pow(10.0, -13.2) / 700e3;
  EXPECT_NEAR(noise_psd_from_dbm(-102.0, 700e3), expected, expected * 1e-14);
  EXPECT_NEAR(default_config().N0, 9.013676349717062e-20, 1e-33);
}

TEST(Scenario, DefaultsAreValid) {
  const ScenarioConfig cfg = default_config(4, 3, 2);
  EXPECT_EQ(cfg.theta.size(), 4u);
  EXPECT_EQ(cfg.P_max.size(), 3u);
  EXPECT_EQ(cfg.W_z.size(), 2u);
  EXPECT_TRUE(validate_config(cfg).empty());
  EXPECT_DOUBLE_EQ(cfg.power_weight(0), 0.16);
}

TEST(Scenario, ValidationNamesTheField) {
  ScenarioConfig cfg = default_config();
  cfg.theta[1] = 0.0;
  cfg.W_z = {400e3, 400e3};
  cfg.P_max.push_back(1.0);
  const auto bad = validate_config(cfg);
  std::vector<std::string> fields;
  for (const auto& v : bad) fields.push_back(v.field);
  EXPECT_NE(std::find(fields.begin(), fields.end(), "theta"), fields.end());
  EXPECT_NE(std::find(fields.begin(), fields.end(), "W_z"), fields.end());
  EXPECT_NE(std::find(fields.begin(), fields.end(), "P_max"), fields.end());
}

TEST(Scenario, ConformSizesFillsFromFirstEntry) {
  ScenarioConfig cfg = default_config();
  cfg.theta = {1e-3};
  cfg.K = 5;
  conform_sizes(cfg);
  ASSERT_EQ(cfg.theta.size(), 5u);
  EXPECT_EQ(cfg.theta[4], 1e-3);
}

TEST(Scenario, Pathloss) {
  EXPECT_EQ(pathloss(0.5, 1.0, 2.5), 1.0);
  EXPECT_NEAR(pathloss(10.0, 1.0, 2.5), std::pow(10.0, -2.5), 1e-18);
}

TEST(Scenario, TopologyStaysInCell) {
  ScenarioConfig cfg = default_config(6, 3, 2);
  Rng rng(3);
  const Topology t = sample_topology(cfg, rng);
  ASSERT_EQ(t.users.size(), 6u);
  ASSERT_EQ(t.rrhs.size(), 3u);
  for (const auto& p : t.users) EXPECT_LE(distance(p, t.mbs), cfg.cell_radius);
  for (const auto& p : t.mbs_users) EXPECT_LE(distance(p, t.mbs), cfg.cell_radius);
}

TEST(Scenario, InstantiateIsDeterministicPerSeed) {
  ScenarioConfig cfg = default_config();
  cfg.num_samples = 50;
  const auto a = instantiate(cfg);
  const auto b = instantiate(cfg);
  EXPECT_EQ(a.samples, b.samples);
  cfg.seed = 2;
  EXPECT_FALSE(instantiate(cfg).samples == a.samples);
}

TEST(Scenario, FadingHasUnitMeanOverPathloss) {
  ScenarioConfig cfg = default_config(2, 1, 1);
  cfg.num_samples = 20000;
  const auto inst = instantiate(cfg);
  const double pl = pathloss(distance(inst.topology.rrhs[0], inst.topology.users[1]), cfg.d0,
                             cfg.pathloss_exponent);
  // exponential fading: standard error 1/sqrt(N)
  EXPECT_NEAR(inst.samples.mean_g(1, 0) / pl, 1.0, 5.0 / std::sqrt(20000.0));
  const auto H = inst.samples.H_samples(0, 0);
  EXPECT_EQ(H.size(), 20000u);
}
