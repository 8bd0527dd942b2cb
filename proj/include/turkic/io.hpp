#pragma once

// File formats. Structured documents are JSON; tabular data is headed CSV.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "turkic/errors.hpp"
#include "turkic/fitting.hpp"
#include "turkic/forgetting.hpp"
#include "turkic/planner.hpp"
#include "turkic/profiles.hpp"
#include "turkic/scaling.hpp"
#include "turkic/transfer.hpp"
#include "turkic/ttc.hpp"

namespace turkic::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Text helpers

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

inline json parse_json(std::string_view text, std::string_view origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(origin) + ": " + e.what());
  }
}

inline json read_json(const std::filesystem::path& path) { return parse_json(read_text(path), path.string()); }

// Shortest representation that round-trips.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view text, std::string_view what) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(std::string(what) + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    cells.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

// Rows of a headed CSV document; blank lines and lines starting with '#' are
// skipped. The header must match `expected` exactly.
inline std::vector<std::vector<std::string>> read_csv_rows(std::string_view text,
                                                           const std::vector<std::string>& expected,
                                                           std::string_view origin) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    auto cells = split_csv_line(line);
    if (!header_seen) {
      if (cells != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        throw ParseError(std::string(origin) + ": header must be '" + want + "'");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != expected.size()) {
      throw ParseError(std::string(origin) + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " fields, expected " + std::to_string(expected.size()));
    }
    rows.push_back(std::move(cells));
  }
  if (!header_seen) throw ParseError(std::string(origin) + ": missing header");
  return rows;
}

namespace detail {

inline double number_field(const json& obj, const char* key, std::string_view who) {
  if (!obj.contains(key)) throw ParseError(std::string(who) + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(std::string(who) + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline void optional_number(const json& obj, const char* key, double& target, std::string_view who) {
  if (obj.contains(key)) target = number_field(obj, key, who);
}

inline std::string string_field(const json& obj, const char* key, std::string_view who) {
  if (!obj.contains(key)) throw ParseError(std::string(who) + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ParseError(std::string(who) + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline void reject_unknown(const json& obj, std::initializer_list<const char*> known, std::string_view who) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ParseError(std::string(who) + ": unknown field '" + it.key() + "'");
  }
}

inline void require_object(const json& j, std::string_view who) {
  if (!j.is_object()) throw ParseError(std::string(who) + ": expected a JSON object");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Profiles: {"profiles": [{"id", "name", "script", "pretrain_repr",
//                          "data_tokens", "ortho_stability"}, ...]}

inline LanguageProfile profile_from_json(const json& j, std::size_t index) {
  std::string who = "profile record " + std::to_string(index);
  detail::require_object(j, who);
  if (j.contains("id") && j.at("id").is_string()) who += " ('" + j.at("id").get<std::string>() + "')";
  detail::reject_unknown(j, {"id", "name", "script", "pretrain_repr", "data_tokens", "ortho_stability"}, who);
  LanguageProfile p;
  p.id = detail::string_field(j, "id", who);
  p.name = j.contains("name") ? detail::string_field(j, "name", who) : p.id;
  const std::string script = detail::string_field(j, "script", who);
  auto s = parse_script(script);
  if (!s) throw ParseError(who + ": field 'script' must be latin, cyrillic or mixed");
  p.script = *s;
  p.pretrain_repr = detail::number_field(j, "pretrain_repr", who);
  p.data_tokens = detail::number_field(j, "data_tokens", who);
  p.ortho_stability = detail::number_field(j, "ortho_stability", who);
  return p;
}

inline json to_json(const LanguageProfile& p) {
  return json{{"id", p.id},
              {"name", p.name},
              {"script", std::string(to_string(p.script))},
              {"pretrain_repr", p.pretrain_repr},
              {"data_tokens", p.data_tokens},
              {"ortho_stability", p.ortho_stability}};
}

inline ProfileSet profiles_from_json(const json& doc) {
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("profiles")) throw ParseError("profile document: missing 'profiles' array");
    list = &doc.at("profiles");
  }
  if (!list->is_array()) throw ParseError("profile document: 'profiles' must be an array");
  std::vector<LanguageProfile> out;
  for (std::size_t i = 0; i < list->size(); ++i) out.push_back(profile_from_json(list->at(i), i));
  return ProfileSet(std::move(out));
}

inline json to_json(const ProfileSet& set) {
  json arr = json::array();
  for (const auto& p : set) arr.push_back(to_json(p));
  return json{{"profiles", arr}};
}

inline ProfileSet load_profiles(const std::filesystem::path& path) { return profiles_from_json(read_json(path)); }

inline void save_profiles(const ProfileSet& set, const std::filesystem::path& path) {
  write_text(path, to_json(set).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Pair components: {"languages": [...], "pairs": [{"source", "target",
//   "morph_sim", "lex_overlap", "syn_sim", "script_compat", "ortho_penalty"}]}

struct ComponentSet {
  std::vector<std::string> languages;
  PairTable pairs;
};

inline ComponentSet components_from_json(const json& doc) {
  detail::require_object(doc, "component document");
  if (!doc.contains("pairs") || !doc.at("pairs").is_array()) {
    throw ParseError("component document: missing 'pairs' array");
  }
  ComponentSet out;
  auto note_language = [&](const std::string& id) {
    if (std::find(out.languages.begin(), out.languages.end(), id) == out.languages.end()) out.languages.push_back(id);
  };
  if (doc.contains("languages")) {
    const auto& langs = doc.at("languages");
    if (!langs.is_array()) throw ParseError("component document: 'languages' must be an array of ids");
    for (const auto& l : langs) {
      if (!l.is_string()) throw ParseError("component document: 'languages' must be an array of ids");
      note_language(l.get<std::string>());
    }
  }
  const auto& pairs = doc.at("pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& r = pairs.at(i);
    std::string who = "pair record " + std::to_string(i);
    detail::require_object(r, who);
    detail::reject_unknown(
        r, {"source", "target", "morph_sim", "lex_overlap", "syn_sim", "script_compat", "ortho_penalty"}, who);
    const std::string s = detail::string_field(r, "source", who);
    const std::string t = detail::string_field(r, "target", who);
    who += " (" + s + "->" + t + ")";
    PairComponents c;
    c.morph_sim = detail::number_field(r, "morph_sim", who);
    c.lex_overlap = detail::number_field(r, "lex_overlap", who);
    c.syn_sim = detail::number_field(r, "syn_sim", who);
    c.script_compat = detail::number_field(r, "script_compat", who);
    c.ortho_penalty = detail::number_field(r, "ortho_penalty", who);
    validate(c, who);
    ::turkic::detail::require(s != t, who + ": self-pairs are implied and must not be listed");
    if (!out.pairs.emplace(LanguagePair{s, t}, c).second) throw ValidationError(who + ": duplicate pair");
    note_language(s);
    note_language(t);
  }
  return out;
}

inline ComponentSet load_components(const std::filesystem::path& path) {
  return components_from_json(read_json(path));
}

// ---------------------------------------------------------------------------
// Small parameter objects. Missing keys keep their defaults.

inline TTCWeights weights_from_json(const json& j) {
  detail::require_object(j, "ttc weights");
  detail::reject_unknown(j, {"w_m", "w_l", "w_s", "w_r", "w_o"}, "ttc weights");
  TTCWeights w;
  detail::optional_number(j, "w_m", w.w_m, "ttc weights");
  detail::optional_number(j, "w_l", w.w_l, "ttc weights");
  detail::optional_number(j, "w_s", w.w_s, "ttc weights");
  detail::optional_number(j, "w_r", w.w_r, "ttc weights");
  detail::optional_number(j, "w_o", w.w_o, "ttc weights");
  validate(w);
  return w;
}

inline json to_json(const TTCWeights& w) {
  return json{{"w_m", w.w_m}, {"w_l", w.w_l}, {"w_s", w.w_s}, {"w_r", w.w_r}, {"w_o", w.w_o}};
}

inline json to_json(const ScalingParams& p) {
  json j = json::object();
  for (std::size_t i = 0; i < kCoupledParamCount; ++i) j[kFitParamNames[i]] = ::turkic::detail::param_value(p, i);
  return j;
}

// Accepts a bare parameter object or any document with a "params" member
// (such as a fit result).
inline ScalingParams scaling_params_from_json(const json& doc) {
  const json& j = doc.is_object() && doc.contains("params") ? doc.at("params") : doc;
  detail::require_object(j, "scaling params");
  ScalingParams p;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::size_t idx = kCoupledParamCount;
    for (std::size_t i = 0; i < kCoupledParamCount; ++i) {
      if (it.key() == kFitParamNames[i]) idx = i;
    }
    if (idx == kCoupledParamCount) throw ParseError("scaling params: unknown field '" + it.key() + "'");
    if (!it.value().is_number()) throw ParseError("scaling params: field '" + it.key() + "' must be a number");
    ::turkic::detail::param_ref(p, idx) = it.value().get<double>();
  }
  validate(p);
  return p;
}

inline ScalingParams load_scaling_params(const std::filesystem::path& path) {
  return scaling_params_from_json(read_json(path));
}

inline SmoothingFloors floors_from_json(const json& j) {
  detail::require_object(j, "floors");
  detail::reject_unknown(j, {"d_floor", "p_floor"}, "floors");
  SmoothingFloors f;
  detail::optional_number(j, "d_floor", f.d_floor, "floors");
  detail::optional_number(j, "p_floor", f.p_floor, "floors");
  validate(f);
  return f;
}

inline json to_json(const SmoothingFloors& f) { return json{{"d_floor", f.d_floor}, {"p_floor", f.p_floor}}; }

inline ForgettingCoeffs forgetting_from_json(const json& j) {
  detail::require_object(j, "forgetting coefficients");
  detail::reject_unknown(j, {"a", "b", "c", "d", "e"}, "forgetting coefficients");
  ForgettingCoeffs k;
  detail::optional_number(j, "a", k.a, "forgetting coefficients");
  detail::optional_number(j, "b", k.b, "forgetting coefficients");
  detail::optional_number(j, "c", k.c, "forgetting coefficients");
  detail::optional_number(j, "d", k.d, "forgetting coefficients");
  detail::optional_number(j, "e", k.e, "forgetting coefficients");
  validate(k);
  return k;
}

inline json to_json(const ForgettingCoeffs& k) {
  return json{{"a", k.a}, {"b", k.b}, {"c", k.c}, {"d", k.d}, {"e", k.e}};
}

inline CTEConfig cte_config_from_json(const json& j) {
  detail::require_object(j, "cte config");
  detail::reject_unknown(j, {"omega", "chi", "tau", "link_constant"}, "cte config");
  CTEConfig c;
  detail::optional_number(j, "omega", c.omega, "cte config");
  detail::optional_number(j, "chi", c.chi, "cte config");
  detail::optional_number(j, "tau", c.tau, "cte config");
  detail::optional_number(j, "link_constant", c.link_constant, "cte config");
  validate(c);
  return c;
}

inline RegimeThresholds thresholds_from_json(const json& j) {
  detail::require_object(j, "regime thresholds");
  detail::reject_unknown(j, {"moderate_min_tokens", "low_min_tokens"}, "regime thresholds");
  RegimeThresholds t;
  detail::optional_number(j, "moderate_min_tokens", t.moderate_min_tokens, "regime thresholds");
  detail::optional_number(j, "low_min_tokens", t.low_min_tokens, "regime thresholds");
  validate(t);
  return t;
}

// ---------------------------------------------------------------------------
// Shared configuration file. Every section is optional.

struct Config {
  TTCWeights ttc_weights;
  SmoothingFloors floors;
  ForgettingCoeffs forgetting;
  DataTransform data_transform = DataTransform::Log10p1;
  CTEConfig cte;
  RegimeThresholds regime_thresholds;
  double p_ref = 0.01;
};

inline Config config_from_json(const json& j) {
  detail::require_object(j, "config");
  detail::reject_unknown(j, {"ttc_weights", "floors", "forgetting", "data_transform", "cte", "regime_thresholds", "p_ref"},
                         "config");
  Config c;
  if (j.contains("ttc_weights")) c.ttc_weights = weights_from_json(j.at("ttc_weights"));
  if (j.contains("floors")) c.floors = floors_from_json(j.at("floors"));
  if (j.contains("forgetting")) c.forgetting = forgetting_from_json(j.at("forgetting"));
  if (j.contains("cte")) c.cte = cte_config_from_json(j.at("cte"));
  if (j.contains("regime_thresholds")) c.regime_thresholds = thresholds_from_json(j.at("regime_thresholds"));
  if (j.contains("data_transform")) {
    const auto& v = j.at("data_transform");
    auto t = v.is_string() ? parse_data_transform(v.get<std::string>()) : std::nullopt;
    if (!t) throw ParseError("config: data_transform must be 'raw' or 'log10p1'");
    c.data_transform = *t;
  }
  detail::optional_number(j, "p_ref", c.p_ref, "config");
  ::turkic::detail::require(std::isfinite(c.p_ref) && c.p_ref > 0.0, "config: p_ref must be > 0");
  return c;
}

inline Config load_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

// ---------------------------------------------------------------------------
// TTC matrix export

inline std::string matrix_to_csv(const TTCMatrix& m) {
  std::string out = "source";
  for (const auto& id : m.ids()) out += "," + id;
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.ids()[i];
    for (std::size_t j = 0; j < m.size(); ++j) out += "," + format_number(m(i, j));
    out += "\n";
  }
  return out;
}

inline json to_json(const TTCMatrix& m) { return json{{"languages", m.ids()}, {"values", m.values()}}; }

inline TTCMatrix matrix_from_json(const json& j) {
  detail::require_object(j, "ttc matrix");
  if (!j.contains("languages") || !j.contains("values")) {
    throw ParseError("ttc matrix: need 'languages' and 'values'");
  }
  try {
    return TTCMatrix(j.at("languages").get<std::vector<std::string>>(), j.at("values").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("ttc matrix: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Observations CSV: model_capacity,data_tokens,adapter_capacity,pretrain_repr,loss

inline const std::vector<std::string>& observation_header() {
  static const std::vector<std::string> h{"model_capacity", "data_tokens", "adapter_capacity", "pretrain_repr", "loss"};
  return h;
}

inline std::vector<Observation> observations_from_csv(std::string_view text, std::string_view origin = "observations") {
  std::vector<Observation> out;
  for (const auto& row : read_csv_rows(text, observation_header(), origin)) {
    Observation o;
    o.inputs.model_capacity = parse_number(row[0], "model_capacity");
    o.inputs.data_tokens = parse_number(row[1], "data_tokens");
    o.inputs.adapter_capacity = parse_number(row[2], "adapter_capacity");
    o.inputs.pretrain_repr = parse_number(row[3], "pretrain_repr");
    o.measured_loss = parse_number(row[4], "loss");
    out.push_back(o);
  }
  return out;
}

inline std::vector<Observation> load_observations(const std::filesystem::path& path) {
  return observations_from_csv(read_text(path), path.string());
}

inline std::string observations_to_csv(std::span<const Observation> obs) {
  std::string out = "model_capacity,data_tokens,adapter_capacity,pretrain_repr,loss\n";
  for (const auto& o : obs) {
    out += format_number(o.inputs.model_capacity) + "," + format_number(o.inputs.data_tokens) + "," +
           format_number(o.inputs.adapter_capacity) + "," + format_number(o.inputs.pretrain_repr) + "," +
           format_number(o.measured_loss) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transfer observations CSV: source,target,delta_perf,source_data_tokens,adapter_capacity

inline std::vector<TransferObservation> transfer_observations_from_csv(std::string_view text,
                                                                       std::string_view origin = "transfer") {
  static const std::vector<std::string> header{"source", "target", "delta_perf", "source_data_tokens",
                                               "adapter_capacity"};
  std::vector<TransferObservation> out;
  for (const auto& row : read_csv_rows(text, header, origin)) {
    TransferObservation o;
    o.source = row[0];
    o.target = row[1];
    o.delta_perf = parse_number(row[2], "delta_perf");
    o.source_data_tokens = parse_number(row[3], "source_data_tokens");
    o.adapter_capacity = parse_number(row[4], "adapter_capacity");
    validate(o);
    out.push_back(std::move(o));
  }
  return out;
}

inline std::vector<TransferObservation> load_transfer_observations(const std::filesystem::path& path) {
  return transfer_observations_from_csv(read_text(path), path.string());
}

// ---------------------------------------------------------------------------
// Fit results

inline json to_json(const FitResult& r, const FitConfig& cfg, std::size_t observation_count) {
  json restarts = json::array();
  for (const auto& s : r.restarts) {
    restarts.push_back({{"initial_objective", s.initial_objective},
                        {"final_objective", s.final_objective},
                        {"iterations", s.iterations},
                        {"converged", s.converged}});
  }
  json config{{"max_iterations", cfg.max_iterations},
              {"convergence_tol", cfg.convergence_tol},
              {"restarts", cfg.restarts},
              {"fit_interactions", cfg.fit_interactions},
              {"floors", to_json(cfg.floors)},
              {"initial_params", cfg.initial_params ? to_json(*cfg.initial_params) : json("heuristic")}};
  return json{{"params", to_json(r.params)},
              {"objective", r.objective},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"best_restart", r.best_restart},
              {"restarts", restarts},
              {"trace", r.trace},
              {"provenance", {{"seed", cfg.seed}, {"observations", observation_count}, {"config", config}}}};
}

// ---------------------------------------------------------------------------
// Plan request / response
//
// Request: {"profiles": [...] | "profiles_file": path,
//           "params": {...} | {"<id>": {...}, ...},
//           "total_budget", "min_per_language", "model_capacity",
//           "adapter_capacity", "weights": {"<id>": w}, "floors": {...}}

inline PlanRequest plan_request_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  detail::require_object(j, "plan request");
  detail::reject_unknown(j,
                         {"profiles", "profiles_file", "params", "total_budget", "min_per_language", "model_capacity",
                          "adapter_capacity", "weights", "floors"},
                         "plan request");
  std::optional<ProfileSet> profiles;
  if (j.contains("profiles")) {
    profiles = profiles_from_json(j.at("profiles"));
  } else if (j.contains("profiles_file")) {
    std::filesystem::path p = detail::string_field(j, "profiles_file", "plan request");
    if (p.is_relative()) p = base_dir / p;
    profiles = load_profiles(p);
  } else {
    throw ParseError("plan request: need 'profiles' or 'profiles_file'");
  }
  if (!j.contains("params")) throw ParseError("plan request: missing field 'params'");

  PlanRequest req{*profiles, {}, 0.0, 0.0, 1e9, 8.0, {}, {}};
  const json& params = j.at("params");
  detail::require_object(params, "plan request params");
  const bool per_language = !params.empty() && params.begin().value().is_object();
  if (per_language) {
    for (const auto& p : req.profiles) {
      if (!params.contains(p.id)) throw ParseError("plan request: no params for language '" + p.id + "'");
      req.params.push_back(scaling_params_from_json(params.at(p.id)));
    }
  } else {
    req.params.push_back(scaling_params_from_json(params));
  }
  req.total_budget = detail::number_field(j, "total_budget", "plan request");
  detail::optional_number(j, "min_per_language", req.min_per_language, "plan request");
  detail::optional_number(j, "model_capacity", req.model_capacity, "plan request");
  detail::optional_number(j, "adapter_capacity", req.adapter_capacity, "plan request");
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    detail::require_object(w, "plan request weights");
    for (const auto& p : req.profiles) {
      req.weights.push_back(w.contains(p.id) ? detail::number_field(w, p.id.c_str(), "plan request weights") : 1.0);
    }
  }
  if (j.contains("floors")) req.floors = floors_from_json(j.at("floors"));
  return req;
}

inline json to_json(const AllocationPlan& plan) {
  json langs = json::array();
  for (const auto& a : plan.languages) {
    langs.push_back({{"id", a.id},
                     {"allocated_tokens", a.allocated},
                     {"loss_before", a.loss_before},
                     {"loss_after", a.loss_after},
                     {"marginal_gain", a.marginal_gain},
                     {"at_minimum", a.at_minimum}});
  }
  return json{{"status", std::string(to_string(plan.status))},
              {"total_budget", plan.total_budget},
              {"aggregate_loss_before", plan.aggregate_before},
              {"aggregate_loss_after", plan.aggregate_after},
              {"marginal_value", plan.marginal_value},
              {"languages", langs}};
}

inline AllocationPlan plan_from_json(const json& j) {
  detail::require_object(j, "plan");
  AllocationPlan plan;
  try {
    plan.status = j.at("status").get<std::string>() == "optimal" ? PlanStatus::Optimal : PlanStatus::LocallyOptimal;
    plan.total_budget = j.at("total_budget").get<double>();
    plan.aggregate_before = j.at("aggregate_loss_before").get<double>();
    plan.aggregate_after = j.at("aggregate_loss_after").get<double>();
    plan.marginal_value = j.at("marginal_value").get<double>();
    for (const auto& l : j.at("languages")) {
      LanguageAllocation a;
      a.id = l.at("id").get<std::string>();
      a.allocated = l.at("allocated_tokens").get<double>();
      a.loss_before = l.at("loss_before").get<double>();
      a.loss_after = l.at("loss_after").get<double>();
      a.marginal_gain = l.at("marginal_gain").get<double>();
      a.at_minimum = l.at("at_minimum").get<bool>();
      plan.languages.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
  return plan;
}

}  // namespace turkic::io
