#include <gtest/gtest.h>

#include "test_support.hpp"
#include "turkic/io.hpp"
#include "turkic/transfer.hpp"

namespace turkic {
namespace {

using testing::data_path;
using testing::Gen;

LanguageProfile target_with(double pretrain_repr, double data_tokens) {
  return {"tt", "Target", Script::Latin, pretrain_repr, data_tokens, 1.0};
}

TEST(CteMeasured, ZeroExponentsReturnDelta) {
  const CTEConfig cfg{0.0, 0.0, 1.0, 1.0};
  EXPECT_EQ(cte_measured({"az", "gz", 0.07, 1e6, 16}, cfg), 0.07);
  EXPECT_EQ(cte_measured({"az", "gz", -0.02, 1e6, 16}, cfg), -0.02);
}

TEST(CteMeasured, DefaultExponents) {
  EXPECT_NEAR(cte_measured({"az", "gz", 0.1, 100, 16}, CTEConfig{}), 0.0025, 1e-15);
  EXPECT_EQ(cte_measured({"az", "gz", 0.0, 100, 16}, CTEConfig{}), 0.0);
}

TEST(CteMeasured, RejectsBadInputs) {
  EXPECT_THROW(cte_measured({"a", "b", 0.1, 0.0, 16}, CTEConfig{}), ValidationError);
  EXPECT_THROW(cte_measured({"a", "b", 0.1, 100, 0.5}, CTEConfig{}), ValidationError);
  EXPECT_THROW(cte_measured({"a", "b", 0.1, 100, 16}, CTEConfig{-1, 0.5, 1, 1}), ValidationError);
}

TEST(CteDistanceAware, UnitDistanceHalves) {
  const TransferObservation o{"az", "gz", 0.1, 100, 16};
  EXPECT_NEAR(cte_distance_aware(o, 1.0, CTEConfig{}), 0.00125, 1e-15);
  EXPECT_EQ(cte_distance_aware(o, 0.0, CTEConfig{}), cte_measured(o, CTEConfig{}));
  CTEConfig flat;
  flat.tau = 0.0;
  EXPECT_EQ(cte_distance_aware(o, 0.7, flat), cte_measured(o, flat));
  EXPECT_THROW(cte_distance_aware(o, -0.1, CTEConfig{}), ValidationError);
}

TEST(CteDistanceAware, StrictlyDecreasingInDistance) {
  Gen g(1);
  for (int i = 0; i < 5000; ++i) {
    const TransferObservation o{"s", "t", g.uniform(1e-4, 1.0), g.log_uniform(1.0, 1e10), g.uniform(1, 256)};
    const CTEConfig cfg{g.uniform(0, 1), g.uniform(0, 1), g.uniform(0.1, 3), 1.0};
    const double d1 = g.uniform(0, 1.5);
    const double d2 = d1 + g.uniform(1e-3, 1.0);
    ASSERT_GT(cte_distance_aware(o, d1, cfg), cte_distance_aware(o, d2, cfg));
  }
}

TEST(CteDistanceAware, RescalingPreservesOrdering) {
  Gen g(2);
  for (int i = 0; i < 2000; ++i) {
    const CTEConfig cfg{g.uniform(0, 1), g.uniform(0, 1), g.uniform(0, 3), 1.0};
    const TransferObservation a{"s", "t", g.uniform(-1, 1), g.log_uniform(1, 1e9), g.uniform(1, 64)};
    const TransferObservation b{"s", "t", g.uniform(-1, 1), g.log_uniform(1, 1e9), g.uniform(1, 64)};
    const double da = g.uniform(0, 1), db = g.uniform(0, 1);
    const double k = g.log_uniform(1e-3, 1e3);
    TransferObservation a2 = a, b2 = b;
    a2.delta_perf *= k;
    b2.delta_perf *= k;
    const double x = cte_distance_aware(a, da, cfg), y = cte_distance_aware(b, db, cfg);
    const double x2 = cte_distance_aware(a2, da, cfg), y2 = cte_distance_aware(b2, db, cfg);
    if (std::abs(x - y) > 1e-12 * std::max(std::abs(x), std::abs(y))) {
      ASSERT_EQ(x < y, x2 < y2);
    }
  }
}

TEST(CtePredicted, WorkedExamples) {
  ScalingParams p;
  p.kappa = 1.0;
  p.pi_exp = 1.0;
  // Pretraining cost 3 gives a factor of 1/4.
  EXPECT_NEAR(cte_predicted(0.9, target_with(1.0 / 3.0, 1e6), 8, p, {}, CTEConfig{}), 0.225, 1e-15);
  EXPECT_EQ(cte_predicted(0.0, target_with(0.5, 1e6), 8, p, {}, CTEConfig{}), 0.0);
  EXPECT_EQ(cte_predicted(0.9, target_with(0.5, 1e6), 8, ScalingParams{}, {}, CTEConfig{}), 0.9);
  CTEConfig doubled;
  doubled.link_constant = 2.0;
  EXPECT_EQ(cte_predicted(0.9, target_with(0.5, 1e6), 8, ScalingParams{}, {}, doubled), 1.8);
}

TEST(CtePredicted, ShippedProfilesPreferBetterRepresentedTargets) {
  const ProfileSet set = io::load_profiles(data_path("turkic/profiles.json"));
  const ScalingParams p = io::load_scaling_params(data_path("fixtures/true_params.json"));
  EXPECT_GT(cte_predicted(0.9, set.at("az"), 16, p, {}, CTEConfig{}),
            cte_predicted(0.9, set.at("gz"), 16, p, {}, CTEConfig{}));
}

TEST(TransferFactor, InUnitIntervalAndMonotone) {
  Gen g(3);
  for (int i = 0; i < 5000; ++i) {
    const ScalingParams p = g.scaling_params(false);
    const AdaptationInputs x = g.inputs();
    const double f = transfer_factor(x.pretrain_repr, x.data_tokens, x.adapter_capacity, p);
    ASSERT_GT(f, 0.0);
    ASSERT_LE(f, 1.0);
    const double up = g.log_uniform(1.01, 10);
    ASSERT_GE(transfer_factor(std::min(1.0, x.pretrain_repr * up), x.data_tokens, x.adapter_capacity, p), f);
    ASSERT_GE(transfer_factor(x.pretrain_repr, x.data_tokens * up, x.adapter_capacity, p), f);
    ASSERT_GE(transfer_factor(x.pretrain_repr, x.data_tokens, x.adapter_capacity * up, p), f);
  }
}

TEST(CtePredicted, LinearInTtc) {
  Gen g(4);
  for (int i = 0; i < 1000; ++i) {
    const ScalingParams p = g.scaling_params(false);
    const LanguageProfile t = target_with(g.uniform(0, 1), g.log_uniform(1, 1e10));
    const double a = g.uniform(0, 1), b = g.uniform(0, 1);
    const double ya = cte_predicted(a, t, 8, p, {}, CTEConfig{});
    const double yb = cte_predicted(b, t, 8, p, {}, CTEConfig{});
    if (a < b) {
      ASSERT_LE(ya, yb);
    }
    ASSERT_NEAR(ya * b, yb * a, 1e-12);
  }
}

TEST(TransferObservations, ShippedFixtureLoads) {
  const auto obs = io::load_transfer_observations(data_path("fixtures/transfer_observations.csv"));
  ASSERT_EQ(obs.size(), 4u);
  EXPECT_EQ(obs[0], (TransferObservation{"az", "gz", 0.1, 100, 16}));
  EXPECT_NEAR(cte_measured(obs[0], CTEConfig{}), 0.0025, 1e-15);
  EXPECT_LT(cte_measured(obs[3], CTEConfig{}), 0.0);
}

}  // namespace
}  // namespace turkic
