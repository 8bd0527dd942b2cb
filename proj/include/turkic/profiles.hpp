#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "turkic/errors.hpp"

namespace turkic {

enum class Script { Latin, Cyrillic, Mixed };

inline std::string_view to_string(Script s) {
  switch (s) {
    case Script::Latin: return "latin";
    case Script::Cyrillic: return "cyrillic";
    case Script::Mixed: return "mixed";
  }
  return "?";
}

inline std::optional<Script> parse_script(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "latin") return Script::Latin;
  if (lower == "cyrillic") return Script::Cyrillic;
  if (lower == "mixed") return Script::Mixed;
  return std::nullopt;
}

// Resource facts for one language.
//
// pretrain_repr is the fraction of the base model's pretraining corpus in
// this language (0..1). data_tokens is the adaptation corpus size in tokens.
// ortho_stability is 1 for a fully standardized orthography.
struct LanguageProfile {
  std::string id;
  std::string name;
  Script script = Script::Latin;
  double pretrain_repr = 0.0;
  double data_tokens = 0.0;
  double ortho_stability = 1.0;

  friend bool operator==(const LanguageProfile&, const LanguageProfile&) = default;
};

inline void validate(const LanguageProfile& p) {
  const std::string who = "profile '" + p.id + "': ";
  detail::require(!p.id.empty(), "profile: field 'id' must be nonempty");
  detail::require(std::isfinite(p.pretrain_repr) && p.pretrain_repr >= 0.0 && p.pretrain_repr <= 1.0,
                  who + "field 'pretrain_repr' must lie in [0, 1]");
  detail::require(std::isfinite(p.data_tokens) && p.data_tokens >= 0.0,
                  who + "field 'data_tokens' must be finite and >= 0");
  detail::require(std::isfinite(p.ortho_stability) && p.ortho_stability >= 0.0 && p.ortho_stability <= 1.0,
                  who + "field 'ortho_stability' must lie in [0, 1]");
}

// Nonempty, ordered collection of profiles with unique ids.
class ProfileSet {
 public:
  explicit ProfileSet(std::vector<LanguageProfile> profiles) : profiles_(std::move(profiles)) {
    detail::require(!profiles_.empty(), "profile set must not be empty");
    std::unordered_set<std::string> seen;
    for (const auto& p : profiles_) {
      validate(p);
      if (!seen.insert(p.id).second) {
        throw ValidationError("profile '" + p.id + "': duplicate id");
      }
    }
  }

  std::size_t size() const { return profiles_.size(); }
  auto begin() const { return profiles_.begin(); }
  auto end() const { return profiles_.end(); }
  const LanguageProfile& operator[](std::size_t i) const { return profiles_[i]; }
  const std::vector<LanguageProfile>& profiles() const { return profiles_; }

  const LanguageProfile* find(std::string_view id) const {
    auto it = std::find_if(profiles_.begin(), profiles_.end(),
                           [&](const LanguageProfile& p) { return p.id == id; });
    return it == profiles_.end() ? nullptr : &*it;
  }

  const LanguageProfile& at(std::string_view id) const {
    if (const auto* p = find(id)) return *p;
    throw ValidationError("unknown language '" + std::string(id) + "'");
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(profiles_.size());
    for (const auto& p : profiles_) out.push_back(p.id);
    return out;
  }

  friend bool operator==(const ProfileSet&, const ProfileSet&) = default;

 private:
  std::vector<LanguageProfile> profiles_;
};

// Ordered so that a larger value means more data.
enum class Regime { ExtremeLow = 0, Low = 1, Moderate = 2 };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::ExtremeLow: return "extreme-low";
    case Regime::Low: return "low";
    case Regime::Moderate: return "moderate";
  }
  return "?";
}

inline std::optional<Regime> parse_regime(std::string_view text) {
  if (text == "extreme-low" || text == "extreme_low" || text == "extremelow") return Regime::ExtremeLow;
  if (text == "low") return Regime::Low;
  if (text == "moderate") return Regime::Moderate;
  return std::nullopt;
}

// Token-count boundaries between resource regimes.
struct RegimeThresholds {
  double moderate_min_tokens = 1e8;
  double low_min_tokens = 1e6;
};

inline void validate(const RegimeThresholds& t) {
  detail::require(std::isfinite(t.moderate_min_tokens) && t.low_min_tokens > 0.0 &&
                      t.moderate_min_tokens > t.low_min_tokens,
                  "regime thresholds: need moderate_min_tokens > low_min_tokens > 0");
}

// Boundary values classify upward.
inline Regime classify_regime(double data_tokens, const RegimeThresholds& t = {}) {
  if (data_tokens >= t.moderate_min_tokens) return Regime::Moderate;
  if (data_tokens >= t.low_min_tokens) return Regime::Low;
  return Regime::ExtremeLow;
}

inline Regime classify_regime(const LanguageProfile& p, const RegimeThresholds& t = {}) {
  return classify_regime(p.data_tokens, t);
}

}  // namespace turkic
