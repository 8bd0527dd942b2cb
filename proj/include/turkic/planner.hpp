#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "turkic/errors.hpp"
#include "turkic/forgetting.hpp"
#include "turkic/profiles.hpp"
#include "turkic/scaling.hpp"

namespace turkic {

// Split `total_budget` extra adaptation tokens across a language family.
// Each language starts from its profile's data_tokens.
struct PlanRequest {
  ProfileSet profiles;
  // One entry shared by every language, or one per profile (same order).
  std::vector<ScalingParams> params;
  double total_budget = 0.0;
  double min_per_language = 0.0;
  double model_capacity = 1e9;
  double adapter_capacity = 8.0;
  // Importance weights, one per profile; empty means all 1.
  std::vector<double> weights;
  SmoothingFloors floors;
};

enum class PlanStatus { Optimal, LocallyOptimal };

inline std::string_view to_string(PlanStatus s) {
  return s == PlanStatus::Optimal ? "optimal" : "locally_optimal";
}

struct LanguageAllocation {
  std::string id;
  double allocated = 0.0;
  double loss_before = 0.0;
  double loss_after = 0.0;
  // Weighted loss reduction per extra token at the allocated point.
  double marginal_gain = 0.0;
  bool at_minimum = false;
};

struct AllocationPlan {
  std::vector<LanguageAllocation> languages;
  double total_budget = 0.0;
  double aggregate_before = 0.0;
  double aggregate_after = 0.0;
  // Common marginal gain of the languages not pinned at the minimum.
  double marginal_value = 0.0;
  PlanStatus status = PlanStatus::Optimal;
};

inline void validate(const PlanRequest& req) {
  const std::size_t n = req.profiles.size();
  detail::require(req.params.size() == 1 || req.params.size() == n,
                  "plan: need one shared parameter set or one per language");
  for (const auto& p : req.params) validate(p);
  detail::require(std::isfinite(req.total_budget) && req.total_budget > 0.0, "plan: total_budget must be > 0");
  detail::require(std::isfinite(req.min_per_language) && req.min_per_language >= 0.0,
                  "plan: min_per_language must be >= 0");
  detail::require(req.weights.empty() || req.weights.size() == n, "plan: need one weight per language");
  for (double w : req.weights) {
    detail::require(std::isfinite(w) && w >= 0.0, "plan: weights must be finite and >= 0");
  }
  detail::require(std::isfinite(req.model_capacity) && req.model_capacity > 0.0, "plan: model_capacity must be > 0");
  detail::require(std::isfinite(req.adapter_capacity) && req.adapter_capacity >= 1.0,
                  "plan: adapter_capacity must be >= 1");
  validate(req.floors);
  if (req.total_budget < req.min_per_language * static_cast<double>(n)) {
    throw ValidationError("plan: infeasible budget: " + std::to_string(req.total_budget) + " < " +
                          std::to_string(n) + " x min_per_language " + std::to_string(req.min_per_language));
  }
}

namespace detail {

class PlanProblem {
 public:
  explicit PlanProblem(const PlanRequest& req) : req_(req), n_(req.profiles.size()) {}

  std::size_t size() const { return n_; }
  const ScalingParams& params(std::size_t i) const { return req_.params.size() == 1 ? req_.params[0] : req_.params[i]; }
  double weight(std::size_t i) const { return req_.weights.empty() ? 1.0 : req_.weights[i]; }

  AdaptationInputs inputs(std::size_t i, double extra) const {
    const auto& p = req_.profiles[i];
    return {req_.model_capacity, p.data_tokens + extra, req_.adapter_capacity, p.pretrain_repr};
  }

  double loss(std::size_t i, double extra) const {
    return interaction_loss(params(i), inputs(i, extra), req_.floors);
  }

  double gain(std::size_t i, double extra) const {
    return -weight(i) * data_slope(params(i), inputs(i, extra), req_.floors);
  }

  double aggregate(std::span<const double> x) const {
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) total += weight(i) * loss(i, x[i]);
    return total;
  }

 private:
  const PlanRequest& req_;
  std::size_t n_;
};

// Largest x in [lo, hi] with gain(x) >= level; gain is non-increasing.
inline double solve_level(const PlanProblem& prob, std::size_t i, double level, double lo, double hi) {
  if (prob.gain(i, lo) <= level) return lo;
  if (prob.gain(i, hi) >= level) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (prob.gain(i, mid) >= level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Euclidean projection onto {x >= floor, sum x = total}.
inline void project_to_budget(std::vector<double>& x, double floor, double total) {
  const std::size_t n = x.size();
  const double mass = total - floor * static_cast<double>(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - floor;
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double t = (cumulative - mass) / static_cast<double>(k + 1);
    if (k + 1 == n || sorted[k + 1] <= t) {
      theta = t;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) x[i] = floor + std::max(y[i] - theta, 0.0);
}

// Returns an allocation with a strictly lower aggregate loss found by moving
// budget between two languages at several scales, or an empty vector.
inline std::vector<double> find_improving_move(const PlanProblem& prob, const std::vector<double>& x, double floor,
                                               double total) {
  const double base = prob.aggregate(x);
  const double tol = 1e-12 * std::max(1.0, std::abs(base));
  std::vector<double> best;
  double best_value = base - tol;
  for (double frac : {1e-6, 1e-4, 1e-2, 1e-1, 0.5, 1.0}) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double movable = x[i] - floor;
      if (movable <= 0.0) continue;
      const double h = std::min(movable, frac * total);
      for (std::size_t j = 0; j < x.size(); ++j) {
        if (j == i) continue;
        std::vector<double> y = x;
        y[i] -= h;
        y[j] += h;
        const double v = prob.aggregate(y);
        if (v < best_value) {
          best_value = v;
          best = std::move(y);
        }
      }
    }
  }
  return best;
}

inline std::vector<double> projected_gradient_descent(const PlanProblem& prob, std::vector<double> x, double floor,
                                                      double total) {
  double value = prob.aggregate(x);
  double step = total;
  for (int it = 0; it < 5000 && step > 1e-9; ++it) {
    std::vector<double> g(x.size());
    double gmax = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      g[i] = prob.gain(i, x[i]);
      gmax = std::max(gmax, std::abs(g[i]));
    }
    if (gmax == 0.0) break;
    bool accepted = false;
    while (step > 1e-9) {
      std::vector<double> y = x;
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += step * g[i] / gmax;
      project_to_budget(y, floor, total);
      const double v = prob.aggregate(y);
      if (v < value) {
        x = std::move(y);
        value = v;
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return x;
}

}  // namespace detail

// Water-filling: find the marginal value at which every language's optimal
// top-up (from 1-D bisection) sums to the budget. A post-check looks for
// improving pairwise moves; if one exists the loss is not convex there, the
// plan is refined by projected gradient descent and flagged locally optimal.
inline AllocationPlan allocate_data_budget(const PlanRequest& req) {
  validate(req);
  const detail::PlanProblem prob(req);
  const std::size_t n = prob.size();
  const double floor = req.min_per_language;
  const double cap = req.total_budget - floor * static_cast<double>(n - 1);

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (prob.gain(i, floor) > 0.0) active.push_back(i);
  }

  std::vector<double> x(n, floor);
  double level = 0.0;
  if (active.empty()) {
    // Flat objective: any feasible split is optimal.
    const double share = (req.total_budget - floor * static_cast<double>(n)) / static_cast<double>(n);
    for (auto& v : x) v += share;
  } else {
    auto fill = [&](double lvl) {
      double sum = floor * static_cast<double>(n - active.size());
      for (std::size_t i : active) {
        x[i] = detail::solve_level(prob, i, lvl, floor, cap);
        sum += x[i];
      }
      return sum;
    };
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i : active) {
      hi = std::max(hi, prob.gain(i, floor));
      lo = std::min(lo, prob.gain(i, cap));
    }
    lo = std::max(lo, hi * 1e-300);
    // Geometric bisection: marginal gains span many orders of magnitude.
    for (int it = 0; it < 400; ++it) {
      const double mid = std::sqrt(lo) * std::sqrt(hi);
      if (!(mid > lo && mid < hi)) break;
      (fill(mid) > req.total_budget ? lo : hi) = mid;
    }
    // The upper end never overspends, so the residual below is small and
    // nonnegative.
    level = hi;
    fill(level);

    // Spread the rounding residual over languages strictly inside the box,
    // or failing that over any with room left.
    double residual = req.total_budget - std::accumulate(x.begin(), x.end(), 0.0);
    for (int pass = 0; pass < 4 && residual != 0.0; ++pass) {
      std::vector<std::size_t> free;
      for (std::size_t i : active) {
        if (x[i] > floor && x[i] < cap) free.push_back(i);
      }
      if (free.empty()) {
        for (std::size_t i : active) {
          if ((residual > 0.0 && x[i] < cap) || (residual < 0.0 && x[i] > floor)) free.push_back(i);
        }
      }
      if (free.empty()) break;
      const double share = residual / static_cast<double>(free.size());
      for (std::size_t i : free) x[i] = std::clamp(x[i] + share, floor, cap);
      residual = req.total_budget - std::accumulate(x.begin(), x.end(), 0.0);
    }
    // Snap languages left a few ulps above the floor and hand the dust to the
    // largest allocation.
    double dust = 0.0;
    for (auto& v : x) {
      if (v > floor && v - floor <= 1e-12 * req.total_budget) {
        dust += v - floor;
        v = floor;
      }
    }
    *std::max_element(x.begin(), x.end()) += dust;
  }

  AllocationPlan plan;
  plan.total_budget = req.total_budget;
  plan.status = PlanStatus::Optimal;
  if (n > 1) {
    auto better = detail::find_improving_move(prob, x, floor, req.total_budget);
    if (!better.empty()) {
      x = detail::projected_gradient_descent(prob, std::move(better), floor, req.total_budget);
      plan.status = PlanStatus::LocallyOptimal;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    LanguageAllocation a;
    a.id = req.profiles[i].id;
    a.allocated = x[i];
    a.loss_before = prob.loss(i, 0.0);
    a.loss_after = prob.loss(i, x[i]);
    a.marginal_gain = prob.gain(i, x[i]);
    a.at_minimum = x[i] <= floor;
    plan.aggregate_before += prob.weight(i) * a.loss_before;
    plan.aggregate_after += prob.weight(i) * a.loss_after;
    plan.languages.push_back(std::move(a));
  }
  plan.marginal_value = level;
  return plan;
}

// ---------------------------------------------------------------------------
// Adapter-rank selection

struct RankContext {
  double model_capacity = 1e9;
  double transfer_support = 0.0;
  SmoothingFloors floors;
  DataTransform transform = DataTransform::Log10p1;
};

struct RankScore {
  double rank = 0.0;
  double predicted_loss = 0.0;
  double forgetting_risk = 0.0;
  double score = 0.0;
};

// score(r) = coupled loss at rank r + trade_weight * forgetting risk at rank
// r. Sorted ascending, ties to the smaller rank.
inline std::vector<RankScore> select_rank(const LanguageProfile& profile, const ScalingParams& p,
                                          const ForgettingCoeffs& k, std::span<const double> candidates,
                                          double trade_weight, const RankContext& ctx = {}) {
  detail::require(!candidates.empty(), "select_rank: candidate list must not be empty");
  detail::require(std::isfinite(trade_weight) && trade_weight >= 0.0, "select_rank: trade weight must be >= 0");
  validate(profile);
  validate(p);
  std::vector<RankScore> out;
  out.reserve(candidates.size());
  for (double r : candidates) {
    const AdaptationInputs x{ctx.model_capacity, profile.data_tokens, r, profile.pretrain_repr};
    validate(x);
    RankScore s;
    s.rank = r;
    s.predicted_loss = interaction_loss(p, x, ctx.floors);
    ForgettingInputs fi;
    fi.adapter_capacity = r;
    fi.data_tokens = profile.data_tokens;
    fi.pretrain_repr = profile.pretrain_repr;
    fi.transfer_support = ctx.transfer_support;
    s.forgetting_risk = forgetting_risk(k, fi, ctx.transform);
    s.score = s.predicted_loss + trade_weight * s.forgetting_risk;
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(), [](const RankScore& a, const RankScore& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.rank < b.rank;
  });
  return out;
}

}  // namespace turkic
