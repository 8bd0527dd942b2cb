#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "turkic/errors.hpp"
#include "turkic/scaling.hpp"

namespace turkic {

struct Observation {
  AdaptationInputs inputs;
  double measured_loss = 0.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Layout of the unconstrained parameter vector. Every parameter is optimized
// as u = log(value), so positivity holds by construction.
enum FitParam : std::size_t {
  kAlpha,
  kBeta,
  kGamma,
  kDelta,
  kEta,
  kRho,
  kKappa,
  kPi,
  kEpsilon,
  kLambdaDp,
  kMuRp,
  kNuDr,
};

inline constexpr std::size_t kBaseParamCount = 9;
inline constexpr std::size_t kCoupledParamCount = 12;

inline constexpr std::array<const char*, kCoupledParamCount> kFitParamNames = {
    "alpha", "beta", "gamma", "delta", "eta", "rho", "kappa", "pi_exp", "epsilon", "lambda_dp", "mu_rp", "nu_dr"};

inline std::size_t free_param_count(bool fit_interactions) {
  return fit_interactions ? kCoupledParamCount : kBaseParamCount;
}

namespace detail {

inline double& param_ref(ScalingParams& p, std::size_t i) {
  switch (i) {
    case kAlpha: return p.alpha;
    case kBeta: return p.beta;
    case kGamma: return p.gamma;
    case kDelta: return p.delta;
    case kEta: return p.eta;
    case kRho: return p.rho;
    case kKappa: return p.kappa;
    case kPi: return p.pi_exp;
    case kEpsilon: return p.epsilon;
    case kLambdaDp: return p.lambda_dp;
    case kMuRp: return p.mu_rp;
    default: return p.nu_dr;
  }
}

inline double param_value(const ScalingParams& p, std::size_t i) {
  return param_ref(const_cast<ScalingParams&>(p), i);
}

inline bool is_exponent(std::size_t i) { return i == kBeta || i == kDelta || i == kRho || i == kPi; }

// Box on u keeping exp(u) representable and the power terms finite over any
// sane input range.
inline double clamp_log_param(std::size_t i, double u) {
  if (is_exponent(i)) return std::clamp(u, std::log(1e-4), std::log(10.0));
  return std::clamp(u, -60.0, 60.0);
}

// Smallest coefficient representable in log space when a start point has a
// zero coefficient.
inline constexpr double kMinLogCoefficient = 1e-12;

}  // namespace detail

inline Eigen::VectorXd to_unconstrained(const ScalingParams& p, bool fit_interactions) {
  const std::size_t n = free_param_count(fit_interactions);
  Eigen::VectorXd u(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    u[static_cast<Eigen::Index>(i)] =
        detail::clamp_log_param(i, std::log(std::max(detail::param_value(p, i), detail::kMinLogCoefficient)));
  }
  return u;
}

// Coupling coefficients are zero when fit_interactions is false.
inline ScalingParams from_unconstrained(const Eigen::VectorXd& u, bool fit_interactions) {
  const std::size_t n = free_param_count(fit_interactions);
  detail::require(static_cast<std::size_t>(u.size()) == n, "fit: parameter vector has the wrong length");
  ScalingParams p;
  for (std::size_t i = 0; i < n; ++i) detail::param_ref(p, i) = std::exp(u[static_cast<Eigen::Index>(i)]);
  return p;
}

inline void validate(const Observation& o, std::size_t index) {
  const std::string who = "observation " + std::to_string(index) + ": ";
  try {
    validate(o.inputs);
  } catch (const ValidationError& e) {
    throw ValidationError(who + e.what());
  }
  detail::require(std::isfinite(o.measured_loss) && o.measured_loss > 0.0,
                  who + "measured loss must be finite and > 0");
}

inline double predict(const ScalingParams& p, const AdaptationInputs& x, bool fit_interactions,
                      const SmoothingFloors& f = {}) {
  return fit_interactions ? interaction_loss(p, x, f) : base_loss(p, x, f);
}

// predicted - measured, one entry per observation.
inline Eigen::VectorXd residuals(const ScalingParams& p, std::span<const Observation> obs, bool fit_interactions,
                                 const SmoothingFloors& f = {}) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t j = 0; j < obs.size(); ++j) {
    r[static_cast<Eigen::Index>(j)] = predict(p, obs[j].inputs, fit_interactions, f) - obs[j].measured_loss;
  }
  return r;
}

inline double objective(const ScalingParams& p, std::span<const Observation> obs, bool fit_interactions,
                        const SmoothingFloors& f = {}) {
  detail::require(!obs.empty(), "fit: observation list must not be empty");
  return residuals(p, obs, fit_interactions, f).squaredNorm() / static_cast<double>(obs.size());
}

// Jacobian of the predictions with respect to the log-parameters, one row per
// observation. d(pred)/du_k = theta_k * d(pred)/d(theta_k).
inline Eigen::MatrixXd prediction_jacobian(const ScalingParams& p, std::span<const Observation> obs,
                                           bool fit_interactions, const SmoothingFloors& f = {}) {
  const auto n = static_cast<Eigen::Index>(obs.size());
  const auto k = static_cast<Eigen::Index>(free_param_count(fit_interactions));
  Eigen::MatrixXd J(n, k);
  for (Eigen::Index j = 0; j < n; ++j) {
    const AdaptationInputs& x = obs[static_cast<std::size_t>(j)].inputs;
    const LossTerms t = loss_terms(p, x, f);
    const double d_eff = std::max(x.data_tokens, f.d_floor);
    const double p_eff = std::max(x.pretrain_repr, f.p_floor);
    J(j, kAlpha) = t.capacity;
    J(j, kBeta) = -p.beta * std::log(x.model_capacity) * t.capacity;
    J(j, kGamma) = t.data;
    J(j, kDelta) = -p.delta * std::log(d_eff) * t.data;
    J(j, kEta) = t.adapter;
    J(j, kRho) = -p.rho * std::log(x.adapter_capacity) * t.adapter;
    J(j, kKappa) = t.pretrain;
    J(j, kPi) = -p.pi_exp * std::log(p_eff) * t.pretrain;
    J(j, kEpsilon) = t.irreducible;
    if (fit_interactions) {
      J(j, kLambdaDp) = -t.data_pretrain;
      J(j, kMuRp) = -t.adapter_pretrain;
      J(j, kNuDr) = -t.data_adapter;
    }
  }
  return J;
}

// Gradient of the mean squared residual with respect to the log-parameters.
inline Eigen::VectorXd objective_gradient(const ScalingParams& p, std::span<const Observation> obs,
                                          bool fit_interactions, const SmoothingFloors& f = {}) {
  detail::require(!obs.empty(), "fit: observation list must not be empty");
  const Eigen::VectorXd r = residuals(p, obs, fit_interactions, f);
  const Eigen::MatrixXd J = prediction_jacobian(p, obs, fit_interactions, f);
  return (2.0 / static_cast<double>(obs.size())) * (J.transpose() * r);
}

struct FitConfig {
  int max_iterations = 500;
  double convergence_tol = 1e-10;
  // Empty means the heuristic start: coefficients 0.1, exponents 0.5,
  // epsilon half the smallest observed loss.
  std::optional<ScalingParams> initial_params;
  bool fit_interactions = false;
  std::uint64_t seed = 0;
  int restarts = 8;
  SmoothingFloors floors;
  // Restarts are independent; >1 runs them on worker threads.
  int threads = 1;
};

inline void validate(const FitConfig& c) {
  detail::require(c.max_iterations >= 1, "fit config: max_iterations must be >= 1");
  detail::require(c.restarts >= 1, "fit config: restarts must be >= 1");
  detail::require(std::isfinite(c.convergence_tol) && c.convergence_tol > 0.0,
                  "fit config: convergence_tol must be > 0");
  detail::require(c.threads >= 1, "fit config: threads must be >= 1");
  validate(c.floors);
  if (c.initial_params) validate(*c.initial_params);
}

struct RestartSummary {
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct FitResult {
  ScalingParams params;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::size_t best_restart = 0;
  std::vector<RestartSummary> restarts;
  // Objective after every accepted step of the winning restart, starting with
  // its initial value. Non-increasing.
  std::vector<double> trace;
};

inline ScalingParams heuristic_start(std::span<const Observation> obs) {
  double min_loss = std::numeric_limits<double>::infinity();
  for (const auto& o : obs) min_loss = std::min(min_loss, o.measured_loss);
  ScalingParams p;
  p.alpha = p.gamma = p.eta = p.kappa = 0.1;
  p.beta = p.delta = p.rho = p.pi_exp = 0.5;
  p.epsilon = 0.5 * min_loss;
  p.lambda_dp = p.mu_rp = p.nu_dr = 0.1;
  return p;
}

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Random start. Exponents are log-uniform; each power term is given a
// log-uniform share of the mean loss at the median input so that no term
// starts out numerically invisible.
inline ScalingParams random_start(std::span<const Observation> obs, bool fit_interactions, std::mt19937_64& rng,
                                  const SmoothingFloors& f) {
  std::vector<double> m, d, r, pr;
  double mean_loss = 0.0, min_loss = std::numeric_limits<double>::infinity();
  for (const auto& o : obs) {
    m.push_back(o.inputs.model_capacity);
    d.push_back(std::max(o.inputs.data_tokens, f.d_floor));
    r.push_back(o.inputs.adapter_capacity);
    pr.push_back(std::max(o.inputs.pretrain_repr, f.p_floor));
    mean_loss += o.measured_loss;
    min_loss = std::min(min_loss, o.measured_loss);
  }
  mean_loss /= static_cast<double>(obs.size());

  auto log_uniform = [&](double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
  };
  auto term = [&](double median_input, double& coeff, double& expo) {
    expo = log_uniform(0.05, 1.0);
    const double share = log_uniform(0.01, 1.0) * mean_loss;
    coeff = share * std::pow(median_input, expo);
  };

  ScalingParams p;
  term(median_of(m), p.alpha, p.beta);
  term(median_of(d), p.gamma, p.delta);
  term(median_of(r), p.eta, p.rho);
  term(median_of(pr), p.kappa, p.pi_exp);
  p.epsilon = log_uniform(0.05, 0.95) * min_loss;
  if (fit_interactions) {
    p.lambda_dp = log_uniform(1e-4, 1e-1) * mean_loss;
    p.mu_rp = log_uniform(1e-4, 1e-1) * mean_loss;
    p.nu_dr = log_uniform(1e-4, 1e-1) * mean_loss;
  }
  return p;
}

inline constexpr double kMaxConditionNumber = 1e12;
inline constexpr double kMaxDamping = 1e16;

struct LmOutcome {
  Eigen::VectorXd u;
  RestartSummary summary;
  std::vector<double> trace;
};

// Damped Gauss-Newton on the log-parameters with Marquardt diagonal scaling.
// Falls back to a scaled gradient step when the damped normal equations are
// ill-conditioned.
inline LmOutcome levenberg_marquardt(Eigen::VectorXd u, std::span<const Observation> obs, const FitConfig& cfg) {
  const bool coupled = cfg.fit_interactions;
  const double n = static_cast<double>(obs.size());
  const auto k = u.size();
  for (Eigen::Index i = 0; i < k; ++i) u[i] = clamp_log_param(static_cast<std::size_t>(i), u[i]);

  ScalingParams p = from_unconstrained(u, coupled);
  Eigen::VectorXd r = residuals(p, obs, coupled, cfg.floors);
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    if (!std::isfinite(r[j])) {
      throw NumericalError("fit: non-finite objective at observation " + std::to_string(j) +
                           " (prediction is not finite at the start point)");
    }
  }
  double cost = r.squaredNorm() / n;

  LmOutcome out;
  out.summary.initial_objective = cost;
  out.trace.push_back(cost);

  Eigen::MatrixXd J = prediction_jacobian(p, obs, coupled, cfg.floors);
  double damping = 1e-3;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    if (cost == 0.0) {
      out.summary.converged = true;
      break;
    }
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    Eigen::VectorXd scale = A.diagonal().cwiseMax(1e-300).cwiseSqrt();

    // Scaled system (S^-1 A S^-1 + damping I) z = -S^-1 g, step = S^-1 z.
    Eigen::MatrixXd H = scale.cwiseInverse().asDiagonal() * A * scale.cwiseInverse().asDiagonal();
    H.diagonal().array() += damping;
    const Eigen::VectorXd gs = g.cwiseQuotient(scale);

    Eigen::VectorXd step;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    const double ev_min = eig.eigenvalues().minCoeff();
    const double ev_max = eig.eigenvalues().maxCoeff();
    if (eig.info() == Eigen::Success && ev_min > 0.0 && ev_max / ev_min <= kMaxConditionNumber) {
      const Eigen::VectorXd z =
          -eig.eigenvectors() * (eig.eigenvectors().transpose() * gs).cwiseQuotient(eig.eigenvalues());
      step = z.cwiseQuotient(scale);
    } else {
      step = -(gs / (1.0 + damping)).cwiseQuotient(scale);
    }

    Eigen::VectorXd trial = u + step;
    for (Eigen::Index i = 0; i < k; ++i) trial[i] = clamp_log_param(static_cast<std::size_t>(i), trial[i]);
    const ScalingParams trial_p = from_unconstrained(trial, coupled);
    const Eigen::VectorXd trial_r = residuals(trial_p, obs, coupled, cfg.floors);
    const double trial_cost = trial_r.squaredNorm() / n;

    if (std::isfinite(trial_cost) && trial_cost < cost) {
      const double rel = (cost - trial_cost) / cost;
      u = trial;
      p = trial_p;
      r = trial_r;
      cost = trial_cost;
      out.trace.push_back(cost);
      J = prediction_jacobian(p, obs, coupled, cfg.floors);
      damping = std::max(damping / 3.0, 1e-15);
      if (rel < cfg.convergence_tol) {
        out.summary.converged = true;
        ++it;
        break;
      }
    } else {
      damping *= 4.0;
      if (damping > kMaxDamping) {
        // No descent direction left at machine precision.
        out.summary.converged = true;
        ++it;
        break;
      }
    }
  }
  out.u = u;
  out.summary.final_objective = cost;
  out.summary.iterations = it;
  return out;
}

}  // namespace detail

// Nonlinear least-squares fit of the loss law. Restart 0 starts from
// cfg.initial_params (or the heuristic start); the others from seeded random
// points. The best restart wins, ties going to the lower index.
inline FitResult fit_scaling(std::span<const Observation> obs, const FitConfig& cfg) {
  validate(cfg);
  const std::size_t need = free_param_count(cfg.fit_interactions);
  if (obs.size() < need) {
    throw ValidationError("fit: insufficient data: " + std::to_string(obs.size()) + " observations for " +
                          std::to_string(need) + " free parameters");
  }
  for (std::size_t j = 0; j < obs.size(); ++j) validate(obs[j], j);

  const auto restarts = static_cast<std::size_t>(cfg.restarts);
  std::vector<Eigen::VectorXd> starts(restarts);
  starts[0] = to_unconstrained(cfg.initial_params.value_or(heuristic_start(obs)), cfg.fit_interactions);
  for (std::size_t i = 1; i < restarts; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    starts[i] = to_unconstrained(detail::random_start(obs, cfg.fit_interactions, rng, cfg.floors),
                                 cfg.fit_interactions);
  }

  std::vector<std::optional<detail::LmOutcome>> outcomes(restarts);
  std::vector<std::exception_ptr> errors(restarts);
  auto run = [&](std::size_t i) {
    try {
      outcomes[i] = detail::levenberg_marquardt(starts[i], obs, cfg);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), restarts);
  if (workers <= 1) {
    for (std::size_t i = 0; i < restarts; ++i) run(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < restarts; i += workers) run(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  FitResult result;
  std::size_t best = 0;
  for (std::size_t i = 0; i < restarts; ++i) {
    result.restarts.push_back(outcomes[i]->summary);
    if (outcomes[i]->summary.final_objective < outcomes[best]->summary.final_objective) best = i;
  }
  const auto& win = *outcomes[best];
  result.params = from_unconstrained(win.u, cfg.fit_interactions);
  result.objective = win.summary.final_objective;
  result.iterations = win.summary.iterations;
  result.converged = win.summary.converged;
  result.best_restart = best;
  result.trace = win.trace;
  return result;
}

// Log-uniform inputs over M in [1e8, 1e11], D in [1e4, 1e10],
// integer R in [4, 256], P in [1e-6, 0.05]; loss from the coupled law plus
// Gaussian noise. Large noise can push a loss below zero, which fit_scaling
// rejects.
inline std::vector<Observation> synthesize_observations(const ScalingParams& truth, std::size_t n,
                                                        double noise_sigma, std::uint64_t seed,
                                                        const SmoothingFloors& f = {}) {
  validate(truth);
  detail::require(n >= 1, "synthesize: n must be >= 1");
  detail::require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "synthesize: noise_sigma must be >= 0");
  std::mt19937_64 rng(seed);
  auto log_uniform = [&](double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
  };
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Observation> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Observation o;
    o.inputs.model_capacity = log_uniform(1e8, 1e11);
    o.inputs.data_tokens = log_uniform(1e4, 1e10);
    o.inputs.adapter_capacity = std::clamp(std::round(log_uniform(4.0, 256.0)), 4.0, 256.0);
    o.inputs.pretrain_repr = log_uniform(1e-6, 0.05);
    const double eps = noise(rng);
    o.measured_loss = interaction_loss(truth, o.inputs, f) + noise_sigma * eps;
    out.push_back(o);
  }
  return out;
}

}  // namespace turkic
