#pragma once

// Command-line front end. Exit codes: 0 ok, 1 I/O, 2 validation or domain
// error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "turkic/turkic.hpp"

namespace turkic::cli {

enum ExitCode : int { kOk = 0, kIoError = 1, kValidationError = 2, kNumericalError = 3 };

enum class Format { Table, Csv, Json };

// Six significant digits, trailing zeros kept.
inline std::string sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.6g", v);
  return buf;
}

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void print(std::ostream& out) const {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "  " : "") << pad(cells[c], width[c]);
      out << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

struct GlobalOptions {
  std::string format = "table";
  std::uint64_t seed = 0;
  std::string config_path;

  Format fmt() const {
    if (format == "json") return Format::Json;
    if (format == "csv") return Format::Csv;
    return Format::Table;
  }
};

inline io::Config load_config_or_default(const GlobalOptions& g) {
  return g.config_path.empty() ? io::Config{} : io::load_config(g.config_path);
}

// ---------------------------------------------------------------------------

struct TtcArgs {
  std::string components;
  std::string weights;
};

inline int cmd_ttc(const GlobalOptions& g, const TtcArgs& a, std::ostream& out) {
  io::Config cfg = load_config_or_default(g);
  if (!a.weights.empty()) cfg.ttc_weights = io::weights_from_json(io::read_json(a.weights));
  const auto comps = io::load_components(a.components);
  const TTCMatrix m = ttc_matrix(comps.pairs, cfg.ttc_weights, comps.languages);
  switch (g.fmt()) {
    case Format::Json: out << io::to_json(m).dump(2) << "\n"; break;
    case Format::Csv: out << io::matrix_to_csv(m); break;
    case Format::Table: {
      Table t;
      t.header.push_back("source");
      for (const auto& id : m.ids()) t.header.push_back(id);
      for (std::size_t i = 0; i < m.size(); ++i) {
        std::vector<std::string> row{m.ids()[i]};
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(sig6(m(i, j)));
        t.rows.push_back(std::move(row));
      }
      t.print(out);
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct PredictArgs {
  std::string params;
  double model_capacity = 0.0;
  double data_tokens = 0.0;
  double rank = 0.0;
  double pretrain_repr = 0.0;
  std::string regime;
};

inline int cmd_predict(const GlobalOptions& g, const PredictArgs& a, std::ostream& out) {
  const io::Config cfg = load_config_or_default(g);
  const ScalingParams p = io::load_scaling_params(a.params);
  const AdaptationInputs x{a.model_capacity, a.data_tokens, a.rank, a.pretrain_repr};
  validate(x);
  std::string regime_name = "none";
  double loss = 0.0;
  if (a.regime.empty()) {
    loss = interaction_loss(p, x, cfg.floors);
  } else {
    Regime r{};
    if (a.regime == "auto") {
      r = classify_regime(a.data_tokens, cfg.regime_thresholds);
    } else if (auto parsed = parse_regime(a.regime)) {
      r = *parsed;
    } else {
      throw ValidationError("predict: --regime must be auto, moderate, low or extreme-low");
    }
    regime_name = std::string(to_string(r));
    loss = regime_loss(p, x, cfg.floors, r);
  }
  switch (g.fmt()) {
    case Format::Json:
      out << io::json{{"loss", loss},
                      {"base_loss", base_loss(p, x, cfg.floors)},
                      {"interaction_loss", interaction_loss(p, x, cfg.floors)},
                      {"regime", regime_name}}
                 .dump(2)
          << "\n";
      break;
    case Format::Csv: out << "loss\n" << io::format_number(loss) << "\n"; break;
    case Format::Table: out << sig6(loss) << "\n"; break;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string observations;
  bool interactions = false;
  int max_iterations = 500;
  int restarts = 8;
  double tol = 1e-10;
  int threads = 1;
  std::string initial_params;
  bool strict = false;
};

inline int cmd_fit(const GlobalOptions& g, const FitArgs& a, std::ostream& out, std::ostream& err) {
  const io::Config cfg = load_config_or_default(g);
  const auto obs = io::load_observations(a.observations);
  FitConfig fc;
  fc.max_iterations = a.max_iterations;
  fc.convergence_tol = a.tol;
  fc.fit_interactions = a.interactions;
  fc.seed = g.seed;
  fc.restarts = a.restarts;
  fc.threads = a.threads;
  fc.floors = cfg.floors;
  if (!a.initial_params.empty()) fc.initial_params = io::load_scaling_params(a.initial_params);
  const FitResult r = fit_scaling(obs, fc);
  switch (g.fmt()) {
    case Format::Json: out << io::to_json(r, fc, obs.size()).dump(2) << "\n"; break;
    case Format::Csv: {
      out << "name,value\n";
      const auto pj = io::to_json(r.params);
      for (std::size_t i = 0; i < free_param_count(fc.fit_interactions); ++i) {
        out << kFitParamNames[i] << "," << io::format_number(pj.at(kFitParamNames[i]).get<double>()) << "\n";
      }
      out << "objective," << io::format_number(r.objective) << "\n";
      break;
    }
    case Format::Table: {
      Table t{{"parameter", "value"}, {}};
      const auto pj = io::to_json(r.params);
      for (std::size_t i = 0; i < free_param_count(fc.fit_interactions); ++i) {
        t.rows.push_back({kFitParamNames[i], sig6(pj.at(kFitParamNames[i]).get<double>())});
      }
      t.rows.push_back({"mse", sig6(r.objective)});
      t.rows.push_back({"iterations", std::to_string(r.iterations)});
      t.rows.push_back({"converged", r.converged ? "yes" : "no"});
      t.print(out);
    }
  }
  if (a.strict && !r.converged) {
    err << "fit: best restart did not converge within " << fc.max_iterations << " iterations\n";
    return kNumericalError;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct CteArgs {
  std::string observations;
  std::string components;
  std::string weights;
  std::string profiles;
  std::string params;
  std::optional<double> omega, chi, tau, link_constant;
};

inline int cmd_cte(const GlobalOptions& g, const CteArgs& a, std::ostream& out) {
  io::Config cfg = load_config_or_default(g);
  if (a.omega) cfg.cte.omega = *a.omega;
  if (a.chi) cfg.cte.chi = *a.chi;
  if (a.tau) cfg.cte.tau = *a.tau;
  if (a.link_constant) cfg.cte.link_constant = *a.link_constant;
  validate(cfg.cte);
  if (!a.weights.empty()) cfg.ttc_weights = io::weights_from_json(io::read_json(a.weights));

  const auto obs = io::load_transfer_observations(a.observations);
  std::optional<TTCMatrix> matrix;
  if (!a.components.empty()) {
    const auto comps = io::load_components(a.components);
    matrix = ttc_matrix(comps.pairs, cfg.ttc_weights, comps.languages);
  }
  std::optional<ProfileSet> profiles;
  std::optional<ScalingParams> params;
  if (!a.profiles.empty() || !a.params.empty()) {
    if (a.profiles.empty() || a.params.empty() || !matrix) {
      throw ValidationError("cte: predictions need --profiles, --params and --components together");
    }
    profiles = io::load_profiles(a.profiles);
    params = io::load_scaling_params(a.params);
  }

  struct Row {
    const TransferObservation* o;
    double measured;
    std::optional<double> dist, aware, ttc, predicted;
  };
  std::vector<Row> rows;
  for (const auto& o : obs) {
    Row r{&o, cte_measured(o, cfg.cte), {}, {}, {}, {}};
    if (matrix) {
      r.dist = distance(*matrix, o.source, o.target);
      r.aware = cte_distance_aware(o, *r.dist, cfg.cte);
      r.ttc = matrix->at(o.source, o.target);
    }
    if (profiles) {
      r.predicted = cte_predicted(*r.ttc, profiles->at(o.target), o.adapter_capacity, *params, cfg.floors, cfg.cte);
    }
    rows.push_back(r);
  }

  auto opt_num = [](const std::optional<double>& v) { return v ? io::format_number(*v) : std::string(); };
  switch (g.fmt()) {
    case Format::Json: {
      io::json arr = io::json::array();
      for (const auto& r : rows) {
        io::json e{{"source", r.o->source},
                   {"target", r.o->target},
                   {"delta_perf", r.o->delta_perf},
                   {"cte_measured", r.measured}};
        if (r.dist) {
          e["distance"] = *r.dist;
          e["cte_distance_aware"] = *r.aware;
          e["ttc"] = *r.ttc;
        }
        if (r.predicted) e["cte_predicted"] = *r.predicted;
        arr.push_back(std::move(e));
      }
      out << io::json{{"config", {{"omega", cfg.cte.omega}, {"chi", cfg.cte.chi}, {"tau", cfg.cte.tau},
                                  {"link_constant", cfg.cte.link_constant}}},
                      {"pairs", arr}}
                 .dump(2)
          << "\n";
      break;
    }
    case Format::Csv:
      out << "source,target,delta_perf,cte_measured,distance,cte_distance_aware,ttc,cte_predicted\n";
      for (const auto& r : rows) {
        out << r.o->source << "," << r.o->target << "," << io::format_number(r.o->delta_perf) << ","
            << io::format_number(r.measured) << "," << opt_num(r.dist) << "," << opt_num(r.aware) << ","
            << opt_num(r.ttc) << "," << opt_num(r.predicted) << "\n";
      }
      break;
    case Format::Table: {
      Table t{{"source", "target", "delta_perf", "cte", "distance", "cte_dist", "ttc", "cte_pred"}, {}};
      auto cell = [](const std::optional<double>& v) { return v ? sig6(*v) : std::string("-"); };
      for (const auto& r : rows) {
        t.rows.push_back({r.o->source, r.o->target, sig6(r.o->delta_perf), sig6(r.measured), cell(r.dist),
                          cell(r.aware), cell(r.ttc), cell(r.predicted)});
      }
      t.print(out);
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ForgettingArgs {
  std::string coeffs;
  std::string profiles;
  std::string components;
  double rank = 1.0;
  double data_tokens = 0.0;
  double pretrain_repr = 0.0;
  std::optional<double> novelty;
  double transfer_support = 0.0;
};

inline int cmd_forgetting(const GlobalOptions& g, const ForgettingArgs& a, std::ostream& out) {
  io::Config cfg = load_config_or_default(g);
  if (!a.coeffs.empty()) cfg.forgetting = io::forgetting_from_json(io::read_json(a.coeffs));

  struct Row {
    std::string id;
    ForgettingInputs in;
    double logit;
    double risk;
  };
  std::vector<Row> rows;
  auto add = [&](std::string id, ForgettingInputs in) {
    const double logit = forgetting_logit(cfg.forgetting, in, cfg.data_transform);
    rows.push_back({std::move(id), in, logit, logistic(logit)});
  };

  if (!a.profiles.empty()) {
    const ProfileSet profiles = io::load_profiles(a.profiles);
    std::optional<TTCMatrix> matrix;
    if (!a.components.empty()) {
      const auto comps = io::load_components(a.components);
      matrix = ttc_matrix(comps.pairs, cfg.ttc_weights, comps.languages);
    }
    for (const auto& p : profiles) {
      ForgettingInputs in;
      in.adapter_capacity = a.rank;
      in.data_tokens = p.data_tokens;
      in.pretrain_repr = p.pretrain_repr;
      in.novelty = a.novelty;
      in.transfer_support =
          matrix && matrix->contains(p.id) ? derive_transfer_support(*matrix, profiles, p.id, cfg.p_ref) : 0.0;
      add(p.id, in);
    }
  } else {
    ForgettingInputs in;
    in.adapter_capacity = a.rank;
    in.data_tokens = a.data_tokens;
    in.pretrain_repr = a.pretrain_repr;
    in.novelty = a.novelty;
    in.transfer_support = a.transfer_support;
    add("input", in);
  }

  switch (g.fmt()) {
    case Format::Json: {
      io::json arr = io::json::array();
      for (const auto& r : rows) {
        arr.push_back({{"id", r.id},
                       {"risk", r.risk},
                       {"logit", r.logit},
                       {"adapter_capacity", r.in.adapter_capacity},
                       {"data_tokens", r.in.data_tokens},
                       {"pretrain_repr", r.in.pretrain_repr},
                       {"novelty", r.in.novelty.value_or(1.0 - r.in.pretrain_repr)},
                       {"transfer_support", r.in.transfer_support}});
      }
      out << io::json{{"coefficients", io::to_json(cfg.forgetting)},
                      {"data_transform", std::string(to_string(cfg.data_transform))},
                      {"languages", arr}}
                 .dump(2)
          << "\n";
      break;
    }
    case Format::Csv:
      out << "id,risk,logit,transfer_support\n";
      for (const auto& r : rows) {
        out << r.id << "," << io::format_number(r.risk) << "," << io::format_number(r.logit) << ","
            << io::format_number(r.in.transfer_support) << "\n";
      }
      break;
    case Format::Table: {
      Table t{{"id", "risk", "logit", "transfer_support"}, {}};
      for (const auto& r : rows) t.rows.push_back({r.id, sig6(r.risk), sig6(r.logit), sig6(r.in.transfer_support)});
      t.print(out);
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

inline int cmd_plan(const GlobalOptions& g, const std::string& request_path, std::ostream& out) {
  const io::Config cfg = load_config_or_default(g);
  const std::filesystem::path path(request_path);
  const io::json doc = io::read_json(path);
  PlanRequest req = io::plan_request_from_json(doc, path.parent_path());
  if (!doc.contains("floors")) req.floors = cfg.floors;
  const AllocationPlan plan = allocate_data_budget(req);
  switch (g.fmt()) {
    case Format::Json: out << io::to_json(plan).dump(2) << "\n"; break;
    case Format::Csv:
      out << "id,allocated_tokens,loss_before,loss_after,marginal_gain\n";
      for (const auto& l : plan.languages) {
        out << l.id << "," << io::format_number(l.allocated) << "," << io::format_number(l.loss_before) << ","
            << io::format_number(l.loss_after) << "," << io::format_number(l.marginal_gain) << "\n";
      }
      break;
    case Format::Table: {
      Table t{{"id", "allocated", "loss_before", "loss_after", "marginal_gain"}, {}};
      for (const auto& l : plan.languages) {
        t.rows.push_back({l.id, sig6(l.allocated), sig6(l.loss_before), sig6(l.loss_after), sig6(l.marginal_gain)});
      }
      t.rows.push_back({"total", sig6(plan.total_budget), sig6(plan.aggregate_before), sig6(plan.aggregate_after),
                        std::string(to_string(plan.status))});
      t.print(out);
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

inline std::vector<long long> parse_counts(const std::string& text) {
  std::vector<long long> counts;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const double v = io::parse_number(token, "fertility count");
    if (v != std::floor(v)) throw ValidationError("fertility: counts must be integers, got '" + token + "'");
    counts.push_back(static_cast<long long>(v));
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  return counts;
}

inline int cmd_fertility(const GlobalOptions& g, const std::string& counts_text, const std::string& input,
                         std::ostream& out) {
  std::string text = counts_text;
  if (!input.empty()) text += " " + io::read_text(input);
  const auto counts = parse_counts(text);
  const double f = fertility(counts);
  switch (g.fmt()) {
    case Format::Json: out << io::json{{"fertility", f}, {"words", counts.size()}}.dump(2) << "\n"; break;
    case Format::Csv: out << "fertility,words\n" << io::format_number(f) << "," << counts.size() << "\n"; break;
    case Format::Table: out << sig6(f) << "\n"; break;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptation-modeling toolkit for low-resource language families"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--config", g.config_path, "JSON config with weights, floors, coefficients");

  TtcArgs ttc;
  auto* s_ttc = app.add_subcommand("ttc", "Transfer-coefficient matrix from pairwise components");
  s_ttc->add_option("--components", ttc.components, "Pairwise component file")->required();
  s_ttc->add_option("--weights", ttc.weights, "Weights file (overrides config)");

  PredictArgs pr;
  auto* s_pred = app.add_subcommand("predict", "Predicted adaptation loss");
  s_pred->add_option("--params", pr.params, "Scaling-parameter file")->required();
  s_pred->add_option("--model-capacity", pr.model_capacity, "Model parameter count")->required();
  s_pred->add_option("--data-tokens", pr.data_tokens, "Adaptation tokens")->required();
  s_pred->add_option("--rank", pr.rank, "Adapter rank")->required();
  s_pred->add_option("--pretrain-repr", pr.pretrain_repr, "Pretraining fraction in [0,1]")->required();
  s_pred->add_option("--regime", pr.regime, "auto, moderate, low or extreme-low");

  FitArgs fit;
  auto* s_fit = app.add_subcommand("fit", "Fit scaling parameters to observations");
  s_fit->add_option("--observations", fit.observations, "Observation CSV")->required();
  s_fit->add_flag("--interactions", fit.interactions, "Also fit the log coupling terms");
  s_fit->add_option("--max-iterations", fit.max_iterations)->capture_default_str();
  s_fit->add_option("--restarts", fit.restarts)->capture_default_str();
  s_fit->add_option("--tol", fit.tol, "Relative objective decrease for convergence")->capture_default_str();
  s_fit->add_option("--threads", fit.threads)->capture_default_str();
  s_fit->add_option("--initial-params", fit.initial_params, "Start point for restart 0");
  s_fit->add_flag("--strict", fit.strict, "Exit 3 if the best restart did not converge");

  CteArgs cte;
  auto* s_cte = app.add_subcommand("cte", "Cross-lingual transfer efficiency report");
  s_cte->add_option("--observations", cte.observations, "Transfer observation CSV")->required();
  s_cte->add_option("--components", cte.components, "Pairwise components (enables distance)");
  s_cte->add_option("--weights", cte.weights, "TTC weights file");
  s_cte->add_option("--profiles", cte.profiles, "Profiles (enables prediction)");
  s_cte->add_option("--params", cte.params, "Target scaling parameters (enables prediction)");
  s_cte->add_option("--omega", cte.omega);
  s_cte->add_option("--chi", cte.chi);
  s_cte->add_option("--tau", cte.tau);
  s_cte->add_option("--link-constant", cte.link_constant);

  ForgettingArgs fg;
  auto* s_fg = app.add_subcommand("forgetting", "Catastrophic-forgetting risk");
  s_fg->add_option("--coeffs", fg.coeffs, "Coefficient file (overrides config)");
  s_fg->add_option("--profiles", fg.profiles, "Report every language in this profile file");
  s_fg->add_option("--components", fg.components, "Pairwise components used to derive transfer support");
  s_fg->add_option("--rank", fg.rank, "Adapter rank")->required();
  s_fg->add_option("--data-tokens", fg.data_tokens);
  s_fg->add_option("--pretrain-repr", fg.pretrain_repr);
  s_fg->add_option("--novelty", fg.novelty);
  s_fg->add_option("--transfer-support", fg.transfer_support);

  std::string plan_request;
  auto* s_plan = app.add_subcommand("plan", "Allocate a data budget across languages");
  s_plan->add_option("--request", plan_request, "Plan request JSON")->required();

  std::string counts, counts_file;
  auto* s_fert = app.add_subcommand("fertility", "Mean tokens per word");
  s_fert->add_option("--counts", counts, "Comma- or space-separated token counts");
  s_fert->add_option("--input", counts_file, "File of token counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidationError;
  }

  try {
    if (*s_ttc) return cmd_ttc(g, ttc, out);
    if (*s_pred) return cmd_predict(g, pr, out);
    if (*s_fit) return cmd_fit(g, fit, out, err);
    if (*s_cte) return cmd_cte(g, cte, out);
    if (*s_fg) return cmd_forgetting(g, fg, out);
    if (*s_plan) return cmd_plan(g, plan_request, out);
    if (*s_fert) return cmd_fertility(g, counts, counts_file, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
  return kValidationError;
}

}  // namespace turkic::cli
