#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "turkic/errors.hpp"
#include "turkic/profiles.hpp"
#include "turkic/ttc.hpp"

namespace turkic {

// Numerically stable 1 / (1 + exp(-x)).
inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Logit = a R + b g(D) + c (1 - P) + d U - e T.
struct ForgettingCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
};

inline void validate(const ForgettingCoeffs& k) {
  for (double v : {k.a, k.b, k.c, k.d, k.e}) {
    detail::require(std::isfinite(v), "forgetting coefficients must be finite");
  }
}

// How raw data tokens enter the logit. Raw token counts saturate the
// logistic for any nonzero b, hence the log default.
enum class DataTransform { Raw, Log10p1 };

inline std::optional<DataTransform> parse_data_transform(std::string_view s) {
  if (s == "raw") return DataTransform::Raw;
  if (s == "log10p1") return DataTransform::Log10p1;
  return std::nullopt;
}

inline std::string_view to_string(DataTransform t) { return t == DataTransform::Raw ? "raw" : "log10p1"; }

inline double transform_data(double data_tokens, DataTransform t) {
  return t == DataTransform::Raw ? data_tokens : std::log10(1.0 + data_tokens);
}

struct ForgettingInputs {
  double adapter_capacity = 1.0;
  double data_tokens = 0.0;
  double pretrain_repr = 0.0;
  // Defaults to 1 - pretrain_repr when absent.
  std::optional<double> novelty;
  double transfer_support = 0.0;
};

inline void validate(const ForgettingInputs& x) {
  auto unit = [](double v, const char* name) {
    detail::require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
                    std::string("forgetting inputs: ") + name + " must lie in [0, 1]");
  };
  detail::require(std::isfinite(x.adapter_capacity) && x.adapter_capacity >= 1.0,
                  "forgetting inputs: adapter_capacity must be >= 1");
  detail::require(std::isfinite(x.data_tokens) && x.data_tokens >= 0.0,
                  "forgetting inputs: data_tokens must be >= 0");
  unit(x.pretrain_repr, "pretrain_repr");
  if (x.novelty) unit(*x.novelty, "novelty");
  unit(x.transfer_support, "transfer_support");
}

inline double forgetting_logit(const ForgettingCoeffs& k, const ForgettingInputs& x,
                               DataTransform transform = DataTransform::Log10p1) {
  validate(k);
  validate(x);
  const double novelty = x.novelty.value_or(1.0 - x.pretrain_repr);
  return k.a * x.adapter_capacity + k.b * transform_data(x.data_tokens, transform) +
         k.c * (1.0 - x.pretrain_repr) + k.d * novelty - k.e * x.transfer_support;
}

inline double forgetting_risk(const ForgettingCoeffs& k, const ForgettingInputs& x,
                              DataTransform transform = DataTransform::Log10p1) {
  return logistic(forgetting_logit(k, x, transform));
}

// Best transfer score into `target` from any other language, each score gated
// by how well the source is represented in pretraining (saturating at p_ref).
inline double derive_transfer_support(const TTCMatrix& m, const ProfileSet& profiles, std::string_view target,
                                      double p_ref = 0.01) {
  detail::require(std::isfinite(p_ref) && p_ref > 0.0, "transfer support: p_ref must be > 0");
  const std::size_t t = m.index_of(target);
  profiles.at(target);
  double best = 0.0;
  for (std::size_t s = 0; s < m.size(); ++s) {
    if (s == t) continue;
    const auto* src = profiles.find(m.ids()[s]);
    if (src == nullptr) continue;
    const double gate = std::min(1.0, src->pretrain_repr / p_ref);
    best = std::max(best, m(s, t) * gate);
  }
  return std::clamp(best, 0.0, 1.0);
}

}  // namespace turkic
