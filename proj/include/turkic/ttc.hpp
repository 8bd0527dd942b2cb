#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "turkic/errors.hpp"

namespace turkic {

// The five ingredients of the transfer coefficient for an ordered pair
// (source, target). Every field is normalized to [0, 1].
struct PairComponents {
  double morph_sim = 0.0;
  double lex_overlap = 0.0;
  double syn_sim = 0.0;
  double script_compat = 0.0;
  double ortho_penalty = 0.0;

  // Convention for s == t.
  static constexpr PairComponents self() { return {1.0, 1.0, 1.0, 1.0, 0.0}; }

  friend bool operator==(const PairComponents&, const PairComponents&) = default;
};

inline void validate(const PairComponents& c, std::string_view who = "pair components") {
  auto unit = [&](double v, const char* field) {
    detail::require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
                    std::string(who) + ": field '" + field + "' must lie in [0, 1]");
  };
  unit(c.morph_sim, "morph_sim");
  unit(c.lex_overlap, "lex_overlap");
  unit(c.syn_sim, "syn_sim");
  unit(c.script_compat, "script_compat");
  unit(c.ortho_penalty, "ortho_penalty");
}

// The four similarity weights sum to one; the orthographic penalty weight is
// separate, so a self-pair always scores exactly 1.
struct TTCWeights {
  double w_m = 0.30;
  double w_l = 0.25;
  double w_s = 0.25;
  double w_r = 0.20;
  double w_o = 0.10;
};

inline constexpr double kWeightSumTolerance = 1e-9;

inline void validate(const TTCWeights& w) {
  for (double v : {w.w_m, w.w_l, w.w_s, w.w_r, w.w_o}) {
    detail::require(std::isfinite(v) && v >= 0.0, "ttc weights: all weights must be finite and >= 0");
  }
  const double sum = w.w_m + w.w_l + w.w_s + w.w_r;
  detail::require(std::abs(sum - 1.0) <= kWeightSumTolerance,
                  "ttc weights: w_m + w_l + w_s + w_r must equal 1 (got " + std::to_string(sum) + ")");
}

// Weighted similarity minus the orthographic penalty. Not clamped: a large
// penalty can make the score negative.
inline double ttc_pair(const PairComponents& c, const TTCWeights& w) {
  validate(c);
  validate(w);
  return w.w_m * c.morph_sim + w.w_l * c.lex_overlap + w.w_s * c.syn_sim + w.w_r * c.script_compat -
         w.w_o * c.ortho_penalty;
}

using LanguagePair = std::pair<std::string, std::string>;
using PairTable = std::map<LanguagePair, PairComponents>;

// Square matrix of transfer scores, row = source, column = target.
class TTCMatrix {
 public:
  TTCMatrix(std::vector<std::string> ids, std::vector<double> row_major)
      : ids_(std::move(ids)), values_(std::move(row_major)) {
    detail::require(values_.size() == ids_.size() * ids_.size(),
                    "ttc matrix: value count must equal the square of the language count");
  }

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(std::size_t row, std::size_t col) const { return values_[row * ids_.size() + col]; }

  std::size_t index_of(std::string_view id) const {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (ids_[i] == id) return i;
    }
    throw ValidationError("unknown language '" + std::string(id) + "' in ttc matrix");
  }

  bool contains(std::string_view id) const {
    for (const auto& s : ids_) {
      if (s == id) return true;
    }
    return false;
  }

  double at(std::string_view source, std::string_view target) const {
    return (*this)(index_of(source), index_of(target));
  }

  bool is_symmetric(double tol = 0.0) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
      }
    }
    return true;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
};

inline TTCMatrix ttc_matrix(const PairTable& pairs, const TTCWeights& w, const std::vector<std::string>& langs) {
  validate(w);
  detail::require(!langs.empty(), "ttc matrix: language list must not be empty");
  const std::size_t n = langs.size();
  std::vector<double> values(n * n, 0.0);
  std::string missing;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        values[i * n + j] = 1.0;
        continue;
      }
      auto it = pairs.find({langs[i], langs[j]});
      if (it == pairs.end()) {
        missing += (missing.empty() ? "" : ", ") + langs[i] + "->" + langs[j];
        continue;
      }
      validate(it->second, "pair " + langs[i] + "->" + langs[j]);
      values[i * n + j] = ttc_pair(it->second, w);
    }
  }
  if (!missing.empty()) throw ValidationError("ttc matrix: missing components for " + missing);
  return TTCMatrix(langs, std::move(values));
}

// 1 minus the symmetrized score; zero on the diagonal.
inline double distance(const TTCMatrix& m, std::string_view s, std::string_view t) {
  const std::size_t i = m.index_of(s);
  const std::size_t j = m.index_of(t);
  if (i == j) return 0.0;
  return 1.0 - 0.5 * (m(i, j) + m(j, i));
}

}  // namespace turkic
