#ifndef GIBBSTV_IO_HPP
#define GIBBSTV_IO_HPP

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gibbstv/harness.hpp"

namespace gibbstv {

using nlohmann::json;

// ---------------------------------------------------------------------------
// window / model

inline json to_json(const Window& w) {
  return json{{"dim", w.dim}, {"lower", w.lower}, {"upper", w.upper}, {"torus", w.torus}};
}

inline Window window_from_json(const json& j) {
  return Window(j.at("lower").get<Point>(), j.at("upper").get<Point>(),
                j.value("torus", false));
}

inline json to_json(const Model& m) {
  json params;
  switch (m.kind()) {
    case ModelKind::Poisson:
      params = {{"beta", m.beta.constant}};
      break;
    case ModelKind::Strauss: {
      const auto& p = m.as<StraussParams>();
      params = {{"beta", m.beta.constant}, {"gamma", p.gamma}, {"R", p.R}};
      break;
    }
    case ModelKind::HardCoreStrauss: {
      const auto& p = m.as<HardCoreStraussParams>();
      params = {{"beta", m.beta.constant},
                {"delta", p.delta},
                {"gamma", p.gamma},
                {"R", p.R}};
      break;
    }
    case ModelKind::BiScaleStrauss: {
      const auto& p = m.as<BiScaleStraussParams>();
      params = {{"beta", m.beta.constant},
                {"gamma", p.gamma},
                {"r", p.r},
                {"R", p.R},
                {"C", p.C}};
      break;
    }
    case ModelKind::AreaInteraction: {
      const auto& p = m.as<AreaInteractionParams>();
      params = {{"beta", m.beta.constant},
                {"gamma", p.gamma},
                {"R", p.R},
                {"area_rel_tol", p.area_rel_tol}};
      break;
    }
    case ModelKind::LennardJones: {
      const auto& p = m.as<LennardJonesParams>();
      params = {{"beta", m.beta.constant}, {"b", p.b}, {"R", p.R}};
      break;
    }
    case ModelKind::Conditioned: {
      const auto& p = m.as<ConditionedParams>();
      json out{{"kind", "conditioned"},
               {"window", to_json(m.window)},
               {"params", json{{"k", p.k}, {"delta", p.delta}}},
               {"base", to_json(*p.base)}};
      return out;
    }
    default:
      throw ParameterError("to_json: model kind not serializable");
  }
  json out{{"kind", to_string(m.kind())}, {"window", to_json(m.window)}, {"params", params}};
  if (m.ruelle.provided())
    out["ruelle"] = {{"c_star", m.ruelle.c_star}, {"psi_star", m.ruelle.psi_star}};
  return out;
}

inline Model model_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  Window w = window_from_json(j.at("window"));
  const json& p = j.value("params", json::object());
  Model m = [&]() {
    if (kind == "poisson") return Model::poisson(w, p.at("beta").get<double>());
    if (kind == "strauss")
      return Model::strauss(w, p.at("beta").get<double>(), p.at("gamma").get<double>(),
                            p.at("R").get<double>());
    if (kind == "hardcore_strauss")
      return Model::hardcore_strauss(w, p.at("beta").get<double>(),
                                     p.at("delta").get<double>(),
                                     p.at("gamma").get<double>(), p.at("R").get<double>());
    if (kind == "bi_scale_strauss")
      return Model::bi_scale_strauss(w, p.at("beta").get<double>(),
                                     p.at("gamma").get<double>(), p.at("r").get<double>(),
                                     p.at("R").get<double>(), p.at("C").get<double>());
    if (kind == "area_interaction")
      return Model::area_interaction(w, p.at("beta").get<double>(),
                                     p.at("gamma").get<double>(), p.at("R").get<double>(),
                                     p.value("area_rel_tol", 1e-6));
    if (kind == "lennard_jones")
      return Model::lennard_jones_classical(w, p.at("beta").get<double>(),
                                            p.at("b").get<double>(), p.at("R").get<double>());
    if (kind == "conditioned") {
      Model base = model_from_json(j.at("base"));
      return restrict_to_Ak(base, p.at("k").get<int>(), p.at("delta").get<double>());
    }
    throw ParameterError("model_from_json: unknown kind '" + kind + "'");
  }();
  if (j.contains("ruelle"))
    m.ruelle = RuelleInfo{j["ruelle"].value("c_star", 0.0),
                          j["ruelle"].at("psi_star").get<double>()};
  return m;
}

// ---------------------------------------------------------------------------
// partitions and lattice configurations

inline json to_json(const Partition& p) {
  json cells = json::array();
  for (std::size_t i = 0; i < p.cell_count(); ++i) {
    Box b = p.cell_box(i);
    cells.push_back(json{{"center", p.center(i)}, {"lo", b.lo}, {"hi", b.hi}});
  }
  return json{{"window", to_json(p.window)},
              {"n_per_dim", p.n_per_dim},
              {"r_V", p.r_V},
              {"cells", cells}};
}

// ---------------------------------------------------------------------------
// scenario

inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.name = j.value("name", std::string("scenario"));
  s.task = j.value("task", std::string("verify"));
  if (j.contains("model_xi")) s.xi = model_from_json(j.at("model_xi"));
  if (j.contains("model_h")) s.h = model_from_json(j.at("model_h"));
  const std::string th = j.value("theorem", std::string("main"));
  if (th == "main")
    s.theorem = TheoremId::Main;
  else if (th == "inhibitory_pip")
    s.theorem = TheoremId::InhibitoryPip;
  else if (th == "general_pip")
    s.theorem = TheoremId::GeneralPip;
  else if (th == "hardcore_pip")
    s.theorem = TheoremId::HardcorePip;
  else if (th == "lennard_jones")
    s.theorem = TheoremId::LennardJones;
  else if (th == "area_vs_hardcore")
    s.theorem = TheoremId::AreaVsHardcore;
  else
    throw ParameterError("scenario: unknown theorem '" + th + "'");
  const std::string mode = j.value("intensity_mode", std::string("envelope"));
  if (mode == "envelope")
    s.mode = IntensityMode::Envelope;
  else if (mode == "monte_carlo")
    s.mode = IntensityMode::MonteCarlo;
  else
    throw ParameterError("scenario: unknown intensity_mode '" + mode + "'");
  if (j.contains("mc")) {
    const json& mc = j["mc"];
    s.mc.reps = mc.value("reps", s.mc.reps);
    s.mc.burn_in = mc.value("burn_in", s.mc.burn_in);
    s.mc.spacing = mc.value("spacing", s.mc.spacing);
    s.mc.seed = mc.value("seed", s.mc.seed);
    s.mc.tol = mc.value("tol", s.mc.tol);
  }
  s.k = j.value("k", s.k);
  s.delta = j.value("delta", s.delta);
  if (j.contains("k_sweep")) s.k_sweep = j["k_sweep"].get<std::vector<int>>();
  if (j.contains("delta_sweep"))
    s.delta_sweep = j["delta_sweep"].get<std::vector<double>>();
  s.n_per_dim = j.value("n_per_dim", s.n_per_dim);
  if (j.contains("n_sweep")) s.n_sweep = j["n_sweep"].get<std::vector<int>>();
  s.horizon = j.value("horizon", s.horizon);
  if (j.contains("beta0")) s.beta0 = j["beta0"].get<double>();
  if (j.contains("R0")) s.R0 = j["R0"].get<double>();
  if (j.contains("cstar_star")) s.cstar_star = j["cstar_star"].get<double>();
  if (j.contains("moment_xi")) s.moment_xi = j["moment_xi"].get<double>();
  if (j.contains("moment_h")) s.moment_h = j["moment_h"].get<double>();
  s.couple_check = j.value("couple_check", false);
  if (j.contains("minpd_grid")) s.minpd_grid = j["minpd_grid"].get<std::vector<double>>();
  s.count_cap = j.value("count_cap", s.count_cap);
  if (s.mc.reps < 1) throw ParameterError("scenario: mc.reps must be >= 1");
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open scenario file '" + path + "'");
  json j;
  in >> j;
  return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// reports

inline json to_json(const SteinParams& sp) {
  json out{{"eps", sp.eps},
           {"c", sp.c},
           {"c1", sp.c1},
           {"truncation_error", sp.truncation_error}};
  if (std::isinf(sp.nstar))
    out["nstar"] = "infinity";
  else
    out["nstar"] = static_cast<long>(sp.nstar);
  return out;
}

inline json to_json(const BoundReport& r) {
  return json{{"theorem_id", r.theorem_id},
              {"bound", r.bound},
              {"vacuous", r.vacuous},
              {"intensity_mode", r.intensity_mode},
              {"stein", to_json(r.stein)},
              {"intermediates", r.intermediates},
              {"notes", r.notes}};
}

inline json to_json(const VerifyReport& r) {
  json gnz = json::array();
  for (const auto& g : r.gnz)
    gnz.push_back(json{{"model", g.model},
                       {"statistic", g.statistic},
                       {"lhs", g.lhs},
                       {"rhs", g.rhs},
                       {"residual", g.residual},
                       {"se", g.se}});
  json out{{"scenario", r.scenario_name},
           {"theoretical", to_json(r.theoretical)},
           {"empirical_lower", r.empirical_lower},
           {"empirical_se", r.empirical_se},
           {"best_statistic", r.best_statistic},
           {"ordering_ok", r.ordering_ok},
           {"gnz_residuals", gnz},
           {"notes", r.notes}};
  if (r.coupling_mean) {
    out["coupling"] = json{{"mean", *r.coupling_mean},
                           {"se", *r.coupling_se},
                           {"c1_bound", *r.coupling_bound}};
  }
  if (r.area_lower) out["area_lower_bound"] = *r.area_lower;
  return out;
}

/// One CSV row per report: bound, Stein constants, then every intermediate.
/// The column set is the union over reports, alphabetically ordered.
inline void write_sweep_csv(std::ostream& os, const std::vector<BoundReport>& reports) {
  std::vector<std::string> keys;
  for (const auto& r : reports)
    for (const auto& [k, v] : r.intermediates)
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  os << "theorem_id,bound,vacuous,c1,eps,c,nstar,truncation_error";
  for (const auto& k : keys) os << ',' << k;
  os << '\n';
  os.precision(17);
  for (const auto& r : reports) {
    os << r.theorem_id << ',' << r.bound << ',' << (r.vacuous ? 1 : 0) << ',' << r.stein.c1
       << ',' << r.stein.eps << ',' << r.stein.c << ',' << r.stein.nstar << ','
       << r.stein.truncation_error;
    for (const auto& k : keys) {
      os << ',';
      auto it = r.intermediates.find(k);
      if (it != r.intermediates.end()) os << it->second;
    }
    os << '\n';
  }
}

}  // namespace gibbstv

#endif
