#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "turkic/errors.hpp"
#include "turkic/profiles.hpp"
#include "turkic/scaling.hpp"

namespace turkic {

// Exponents of the source-side cost D_s^omega R^chi and of the distance
// penalty (1 + dist)^tau, plus the proportionality constant used by the
// similarity-based predictor.
struct CTEConfig {
  double omega = 0.5;
  double chi = 0.5;
  double tau = 1.0;
  double link_constant = 1.0;
};

inline void validate(const CTEConfig& c) {
  for (double v : {c.omega, c.chi, c.tau}) {
    detail::require(std::isfinite(v) && v >= 0.0, "cte config: omega, chi and tau must be finite and >= 0");
  }
  detail::require(std::isfinite(c.link_constant) && c.link_constant > 0.0,
                  "cte config: link_constant must be finite and > 0");
}

// One measured transfer: adapting on `source` changed the score on `target`
// by delta_perf (task-metric units, may be negative).
struct TransferObservation {
  std::string source;
  std::string target;
  double delta_perf = 0.0;
  double source_data_tokens = 1.0;
  double adapter_capacity = 1.0;

  friend bool operator==(const TransferObservation&, const TransferObservation&) = default;
};

inline void validate(const TransferObservation& o) {
  const std::string who = "transfer " + o.source + "->" + o.target + ": ";
  detail::require(std::isfinite(o.delta_perf), who + "delta_perf must be finite");
  detail::require(std::isfinite(o.source_data_tokens) && o.source_data_tokens > 0.0,
                  who + "source_data_tokens must be > 0");
  detail::require(std::isfinite(o.adapter_capacity) && o.adapter_capacity >= 1.0,
                  who + "adapter_capacity must be >= 1");
}

// Improvement per unit of source-side adaptation cost. Sign follows
// delta_perf.
inline double cte_measured(const TransferObservation& o, const CTEConfig& cfg) {
  validate(o);
  validate(cfg);
  return o.delta_perf / (std::pow(o.source_data_tokens, cfg.omega) * std::pow(o.adapter_capacity, cfg.chi));
}

inline double cte_distance_aware(const TransferObservation& o, double dist, const CTEConfig& cfg) {
  detail::require(std::isfinite(dist) && dist >= 0.0, "cte: distance must be finite and >= 0");
  return cte_measured(o, cfg) / std::pow(1.0 + dist, cfg.tau);
}

// Target-side readiness in (0, 1]: reciprocal of one plus the pretraining,
// data and adapter cost terms of the target's loss law.
inline double transfer_factor(double pretrain_repr, double data_tokens, double adapter_capacity,
                              const ScalingParams& p, const SmoothingFloors& f = {}) {
  validate(p);
  const double p_eff = std::max(pretrain_repr, f.p_floor);
  const double d_eff = std::max(data_tokens, f.d_floor);
  const double cost = p.kappa * std::pow(p_eff, -p.pi_exp) + p.gamma * std::pow(d_eff, -p.delta) +
                      p.eta * std::pow(adapter_capacity, -p.rho);
  return 1.0 / (1.0 + cost);
}

inline double cte_predicted(double ttc, const LanguageProfile& target, double adapter_capacity,
                            const ScalingParams& p, const SmoothingFloors& f, const CTEConfig& cfg) {
  detail::require(std::isfinite(ttc), "cte: ttc must be finite");
  detail::require(std::isfinite(adapter_capacity) && adapter_capacity >= 1.0, "cte: adapter_capacity must be >= 1");
  validate(target);
  validate(cfg);
  return cfg.link_constant * ttc *
         transfer_factor(target.pretrain_repr, target.data_tokens, adapter_capacity, p, f);
}

}  // namespace turkic
