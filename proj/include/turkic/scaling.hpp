#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Core>

#include "turkic/errors.hpp"
#include "turkic/profiles.hpp"

namespace turkic {

// Constants of the adaptation loss law for one language
//
//   L = alpha M^-beta + gamma D^-delta + eta R^-rho + kappa P^-pi + epsilon
//       - lambda_dp log(1 + D P) - mu_rp log(1 + R P) - nu_dr log(1 + D R)
//
// The three log couplings are optional (zero disables them).
struct ScalingParams {
  double alpha = 0.0;
  double beta = 1.0;
  double gamma = 0.0;
  double delta = 1.0;
  double eta = 0.0;
  double rho = 1.0;
  double kappa = 0.0;
  double pi_exp = 1.0;
  double epsilon = 0.0;
  double lambda_dp = 0.0;
  double mu_rp = 0.0;
  double nu_dr = 0.0;

  friend bool operator==(const ScalingParams&, const ScalingParams&) = default;
};

inline void validate(const ScalingParams& p) {
  auto coeff = [](double v, const char* name) {
    detail::require(std::isfinite(v) && v >= 0.0,
                    std::string("scaling params: coefficient '") + name + "' must be finite and >= 0");
  };
  auto expo = [](double v, const char* name) {
    detail::require(std::isfinite(v) && v > 0.0,
                    std::string("scaling params: exponent '") + name + "' must be finite and > 0");
  };
  coeff(p.alpha, "alpha");
  coeff(p.gamma, "gamma");
  coeff(p.eta, "eta");
  coeff(p.kappa, "kappa");
  coeff(p.epsilon, "epsilon");
  coeff(p.lambda_dp, "lambda_dp");
  coeff(p.mu_rp, "mu_rp");
  coeff(p.nu_dr, "nu_dr");
  expo(p.beta, "beta");
  expo(p.delta, "delta");
  expo(p.rho, "rho");
  expo(p.pi_exp, "pi_exp");
}

// model_capacity is a parameter count; adapter_capacity is the LoRA rank or
// an equivalent bandwidth.
struct AdaptationInputs {
  double model_capacity = 1.0;
  double data_tokens = 0.0;
  double adapter_capacity = 1.0;
  double pretrain_repr = 0.0;

  friend bool operator==(const AdaptationInputs&, const AdaptationInputs&) = default;
};

inline void validate(const AdaptationInputs& x) {
  detail::require(std::isfinite(x.model_capacity) && x.model_capacity > 0.0,
                  "inputs: model_capacity must be finite and > 0");
  detail::require(std::isfinite(x.data_tokens) && x.data_tokens >= 0.0,
                  "inputs: data_tokens must be finite and >= 0");
  detail::require(std::isfinite(x.adapter_capacity) && x.adapter_capacity >= 1.0,
                  "inputs: adapter_capacity must be finite and >= 1");
  detail::require(std::isfinite(x.pretrain_repr) && x.pretrain_repr >= 0.0 && x.pretrain_repr <= 1.0,
                  "inputs: pretrain_repr must lie in [0, 1]");
}

// Lower bounds applied to D and P before the power terms, which are singular
// at zero.
struct SmoothingFloors {
  double d_floor = 1.0;
  double p_floor = 1e-6;
};

inline void validate(const SmoothingFloors& f) {
  detail::require(std::isfinite(f.d_floor) && f.d_floor > 0.0, "floors: d_floor must be > 0");
  detail::require(std::isfinite(f.p_floor) && f.p_floor > 0.0, "floors: p_floor must be > 0");
}

// Individual contributions to the loss. Coupling terms are stored as the
// nonnegative amounts subtracted from the base loss.
struct LossTerms {
  double capacity = 0.0;
  double data = 0.0;
  double adapter = 0.0;
  double pretrain = 0.0;
  double irreducible = 0.0;
  double data_pretrain = 0.0;
  double adapter_pretrain = 0.0;
  double data_adapter = 0.0;

  double base() const { return capacity + data + adapter + pretrain + irreducible; }
  double coupled() const { return base() - (data_pretrain + adapter_pretrain + data_adapter); }
};

inline LossTerms loss_terms(const ScalingParams& p, const AdaptationInputs& x, const SmoothingFloors& f = {}) {
  const double d_eff = std::max(x.data_tokens, f.d_floor);
  const double p_eff = std::max(x.pretrain_repr, f.p_floor);
  LossTerms t;
  t.capacity = p.alpha * std::pow(x.model_capacity, -p.beta);
  t.data = p.gamma * std::pow(d_eff, -p.delta);
  t.adapter = p.eta * std::pow(x.adapter_capacity, -p.rho);
  t.pretrain = p.kappa * std::pow(p_eff, -p.pi_exp);
  t.irreducible = p.epsilon;
  // Raw D and P inside the logs: log1p is regular at zero.
  t.data_pretrain = p.lambda_dp * std::log1p(x.data_tokens * x.pretrain_repr);
  t.adapter_pretrain = p.mu_rp * std::log1p(x.adapter_capacity * x.pretrain_repr);
  t.data_adapter = p.nu_dr * std::log1p(x.data_tokens * x.adapter_capacity);
  return t;
}

inline double base_loss(const ScalingParams& p, const AdaptationInputs& x, const SmoothingFloors& f = {}) {
  return loss_terms(p, x, f).base();
}

inline double interaction_loss(const ScalingParams& p, const AdaptationInputs& x, const SmoothingFloors& f = {}) {
  return loss_terms(p, x, f).coupled();
}

// Extreme-low-resource languages use the uncoupled law; everything else the
// coupled one. Hard switch, no blending across the boundary.
inline double regime_loss(const ScalingParams& p, const AdaptationInputs& x, const SmoothingFloors& f,
                          Regime regime) {
  return regime == Regime::ExtremeLow ? base_loss(p, x, f) : interaction_loss(p, x, f);
}

// d/dD of the coupled loss at x (zero slope of the data term below d_floor).
inline double data_slope(const ScalingParams& p, const AdaptationInputs& x, const SmoothingFloors& f = {}) {
  double slope = 0.0;
  if (x.data_tokens >= f.d_floor) {
    slope -= p.gamma * p.delta * std::pow(x.data_tokens, -p.delta - 1.0);
  }
  slope -= p.lambda_dp * x.pretrain_repr / (1.0 + x.data_tokens * x.pretrain_repr);
  slope -= p.nu_dr * x.adapter_capacity / (1.0 + x.data_tokens * x.adapter_capacity);
  return slope;
}

// ---------------------------------------------------------------------------
// Low-rank adapter arithmetic

struct LoraParamCount {
  std::uint64_t trainable = 0;
  std::uint64_t full = 0;
  double ratio = 0.0;

  friend bool operator==(const LoraParamCount&, const LoraParamCount&) = default;
};

// Parameter counts for a rank-r update of a d x k weight matrix.
inline LoraParamCount lora_param_count(std::uint64_t d, std::uint64_t k, std::uint64_t r) {
  detail::require(d >= 1 && k >= 1, "lora: matrix dimensions must be >= 1");
  detail::require(r >= 1 && r <= std::min(d, k),
                  "lora: rank " + std::to_string(r) + " out of range [1, " + std::to_string(std::min(d, k)) + "]");
  LoraParamCount out;
  out.trainable = r * (d + k);
  out.full = d * k;
  out.ratio = static_cast<double>(out.trainable) / static_cast<double>(out.full);
  return out;
}

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// W + B A, with B of shape d x r and A of shape r x k.
inline Matrix apply_low_rank_update(const Matrix& W, const Matrix& B, const Matrix& A) {
  if (B.rows() != W.rows() || A.cols() != W.cols() || B.cols() != A.rows()) {
    throw ValidationError("low-rank update: dimension mismatch (W " + std::to_string(W.rows()) + "x" +
                          std::to_string(W.cols()) + ", B " + std::to_string(B.rows()) + "x" +
                          std::to_string(B.cols()) + ", A " + std::to_string(A.rows()) + "x" +
                          std::to_string(A.cols()) + ")");
  }
  Matrix out = W;
  out.noalias() += B * A;
  return out;
}

// ---------------------------------------------------------------------------
// Tokenizer fertility: mean subword tokens per word.

template <typename Count>
double fertility(std::span<const Count> tokens_per_word) {
  if (tokens_per_word.empty()) throw ValidationError("fertility: token count list must not be empty");
  double total = 0.0;
  for (const auto c : tokens_per_word) {
    detail::require(c >= 1, "fertility: every word must produce at least one token");
    total += static_cast<double>(c);
  }
  return total / static_cast<double>(tokens_per_word.size());
}

template <typename Container>
double fertility(const Container& counts) {
  return fertility(std::span<const typename Container::value_type>(counts.data(), counts.size()));
}

}  // namespace turkic
