#include <gtest/gtest.h>

#include <vector>

#include "test_support.hpp"
#include "turkic/fitting.hpp"
#include "turkic/io.hpp"

namespace turkic {
namespace {

using testing::data_path;
using testing::Gen;

ScalingParams true_params() { return io::load_scaling_params(data_path("fixtures/true_params.json")); }

// Central differences of the objective in log-parameter space.
Eigen::VectorXd numeric_gradient(const ScalingParams& p, std::span<const Observation> obs, bool coupled) {
  const Eigen::VectorXd u = to_unconstrained(p, coupled);
  Eigen::VectorXd g(u.size());
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    Eigen::VectorXd up = u, dn = u;
    up[i] += h;
    dn[i] -= h;
    g[i] = (objective(from_unconstrained(up, coupled), obs, coupled) -
            objective(from_unconstrained(dn, coupled), obs, coupled)) /
           (2 * h);
  }
  return g;
}

TEST(Residuals, PerfectModelGivesZeros) {
  const ScalingParams p = true_params();
  const auto obs = synthesize_observations(p, 20, 0.0, 3);
  EXPECT_EQ(residuals(p, obs, true), Eigen::VectorXd::Zero(20));
}

TEST(Residuals, ConstantOffset) {
  ScalingParams p;
  p.epsilon = 1.0;
  const std::vector<Observation> obs{{{1e9, 1e6, 8, 0.01}, 2.0}};
  EXPECT_EQ(residuals(p, obs, false)[0], -1.0);
  EXPECT_EQ(objective(p, obs, false), 1.0);
}

TEST(Gradient, VanishesAtExactFit) {
  const ScalingParams p = true_params();
  const auto obs = synthesize_observations(p, 50, 0.0, 4);
  EXPECT_LT(objective_gradient(p, obs, true).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gradient, IrreducibleCoordinateForSingleObservation) {
  ScalingParams p = true_params();
  const std::vector<Observation> obs{{{1e9, 1e6, 8, 0.01}, 1.0}};
  const double r = residuals(p, obs, false)[0];
  EXPECT_NEAR(objective_gradient(p, obs, false)[kEpsilon], 2 * r * p.epsilon, 1e-12 * std::abs(r));
}

TEST(Gradient, MatchesCentralDifferences) {
  Gen g(5);
  for (int trial = 0; trial < 60; ++trial) {
    const bool coupled = g.coin();
    const ScalingParams truth = g.scaling_params(coupled);
    const auto obs = synthesize_observations(truth, 20, 0.0, static_cast<std::uint64_t>(trial));
    ScalingParams p = g.scaling_params(coupled);
    const Eigen::VectorXd analytic = objective_gradient(p, obs, coupled);
    const Eigen::VectorXd numeric = numeric_gradient(p, obs, coupled);
    const double scale = std::max(analytic.norm(), 1e-300);
    ASSERT_LT((analytic - numeric).norm() / scale, 1e-5) << "trial " << trial;
  }
}

TEST(FitScaling, RecoversExponentsFromNoiselessData) {
  const ScalingParams truth = true_params();
  int recovered = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto obs = synthesize_observations(truth, 200, 0.0, seed);
    FitConfig cfg;
    cfg.seed = seed;
    const FitResult fit = fit_scaling(obs, cfg);
    const bool ok = fit.objective < 1e-8 && std::abs(fit.params.beta / truth.beta - 1) < 0.1 &&
                    std::abs(fit.params.delta / truth.delta - 1) < 0.1 &&
                    std::abs(fit.params.rho / truth.rho - 1) < 0.1 &&
                    std::abs(fit.params.pi_exp / truth.pi_exp - 1) < 0.1;
    recovered += ok ? 1 : 0;
  }
  EXPECT_GE(recovered, 4);
}

TEST(FitScaling, NoisyObjectiveMatchesNoiseVariance) {
  const double sigma = 0.01;
  const auto obs = synthesize_observations(true_params(), 500, sigma, 7);
  FitConfig cfg;
  cfg.seed = 7;
  const FitResult fit = fit_scaling(obs, cfg);
  const double ratio = fit.objective / (sigma * sigma);
  EXPECT_GT(ratio, 0.5);
  EXPECT_LT(ratio, 2.0);
}

TEST(FitScaling, TooFewObservations) {
  const auto obs = synthesize_observations(true_params(), 3, 0.0, 1);
  try {
    fit_scaling(obs, FitConfig{});
    FAIL() << "expected insufficient data";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient data"), std::string::npos);
  }
  const auto nine = synthesize_observations(true_params(), 9, 0.0, 1);
  FitConfig coupled;
  coupled.fit_interactions = true;
  EXPECT_THROW(fit_scaling(nine, coupled), ValidationError);
  EXPECT_NO_THROW(fit_scaling(nine, FitConfig{}));
}

TEST(FitScaling, NonFiniteStartNamesObservation) {
  auto obs = synthesize_observations(true_params(), 12, 0.0, 2);
  obs[5].inputs.model_capacity = 1e-300;
  FitConfig cfg;
  cfg.restarts = 1;
  ScalingParams start = true_params();
  start.beta = 10.0;
  cfg.initial_params = start;
  try {
    fit_scaling(obs, cfg);
    FAIL() << "expected numerical error";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("observation 5"), std::string::npos) << e.what();
  }
}

TEST(FitScaling, InvalidObservationRejected) {
  auto obs = synthesize_observations(true_params(), 12, 0.0, 2);
  obs[3].inputs.pretrain_repr = 2.0;
  EXPECT_THROW(fit_scaling(obs, FitConfig{}), ValidationError);
}

TEST(FitScaling, TraceIsNonIncreasing) {
  Gen g(9);
  for (int trial = 0; trial < 10; ++trial) {
    const bool coupled = g.coin();
    const auto obs = synthesize_observations(g.scaling_params(coupled), 60, 0.005, static_cast<std::uint64_t>(trial));
    FitConfig cfg;
    cfg.fit_interactions = coupled;
    cfg.restarts = 3;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const FitResult fit = fit_scaling(obs, cfg);
    ASSERT_FALSE(fit.trace.empty());
    for (std::size_t i = 1; i < fit.trace.size(); ++i) ASSERT_LE(fit.trace[i], fit.trace[i - 1]);
    EXPECT_EQ(fit.trace.back(), fit.objective);
    for (const auto& r : fit.restarts) {
      ASSERT_LE(fit.objective, r.initial_objective);
      ASSERT_LE(fit.objective, r.final_objective);
    }
  }
}

TEST(FitScaling, DeterministicForFixedSeed) {
  const auto obs = synthesize_observations(true_params(), 80, 0.01, 11);
  FitConfig cfg;
  cfg.seed = 99;
  cfg.fit_interactions = true;
  const FitResult a = fit_scaling(obs, cfg);
  const FitResult b = fit_scaling(obs, cfg);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.best_restart, b.best_restart);
}

TEST(FitScaling, ThreadCountDoesNotChangeResult) {
  const auto obs = synthesize_observations(true_params(), 80, 0.01, 12);
  FitConfig cfg;
  cfg.seed = 5;
  const FitResult serial = fit_scaling(obs, cfg);
  cfg.threads = 4;
  const FitResult parallel = fit_scaling(obs, cfg);
  EXPECT_EQ(serial.params, parallel.params);
  EXPECT_EQ(serial.best_restart, parallel.best_restart);
  EXPECT_EQ(serial.trace, parallel.trace);
}

TEST(FitScaling, ConfigValidation) {
  const auto obs = synthesize_observations(true_params(), 20, 0.0, 1);
  FitConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW(fit_scaling(obs, cfg), ValidationError);
  cfg = {};
  cfg.max_iterations = 0;
  EXPECT_THROW(fit_scaling(obs, cfg), ValidationError);
  cfg = {};
  cfg.convergence_tol = -1;
  EXPECT_THROW(fit_scaling(obs, cfg), ValidationError);
}

TEST(Synthesize, NoiselessDataHasZeroResidual) {
  const ScalingParams truth = true_params();
  const auto obs = synthesize_observations(truth, 100, 0.0, 21);
  for (const auto& o : obs) ASSERT_EQ(interaction_loss(truth, o.inputs), o.measured_loss);
}

TEST(Synthesize, SeedDeterminesOutput) {
  const ScalingParams truth = true_params();
  EXPECT_EQ(synthesize_observations(truth, 50, 0.01, 8), synthesize_observations(truth, 50, 0.01, 8));
  EXPECT_NE(synthesize_observations(truth, 50, 0.01, 8), synthesize_observations(truth, 50, 0.01, 9));
}

TEST(Synthesize, NoiseIsCentred) {
  const ScalingParams truth = true_params();
  const auto obs = synthesize_observations(truth, 1000, 0.01, 23);
  double mean = 0.0;
  for (const auto& o : obs) mean += o.measured_loss - interaction_loss(truth, o.inputs);
  mean /= 1000.0;
  EXPECT_LT(std::abs(mean), 0.002);
}

TEST(Synthesize, InputsWithinDocumentedRanges) {
  const auto obs = synthesize_observations(true_params(), 2000, 0.0, 24);
  for (const auto& o : obs) {
    ASSERT_GE(o.inputs.model_capacity, 1e8);
    ASSERT_LE(o.inputs.model_capacity, 1e11);
    ASSERT_GE(o.inputs.data_tokens, 1e4);
    ASSERT_LE(o.inputs.data_tokens, 1e10);
    ASSERT_GE(o.inputs.adapter_capacity, 4.0);
    ASSERT_LE(o.inputs.adapter_capacity, 256.0);
    ASSERT_EQ(o.inputs.adapter_capacity, std::round(o.inputs.adapter_capacity));
    ASSERT_GE(o.inputs.pretrain_repr, 1e-6);
    ASSERT_LE(o.inputs.pretrain_repr, 0.05);
  }
}

TEST(Synthesize, InputsDoNotDependOnNoiseLevel) {
  const auto a = synthesize_observations(true_params(), 30, 0.0, 25);
  const auto b = synthesize_observations(true_params(), 30, 0.1, 25);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i].inputs, b[i].inputs);
}

}  // namespace
}  // namespace turkic
