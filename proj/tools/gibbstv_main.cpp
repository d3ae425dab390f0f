// Command-line driver: evaluate theorem bounds, simulate spatial birth-death
// processes, run couplings, discretization bounds, and full verification
// scenarios described by JSON files. See the README for the scenario schema.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gibbstv/gibbstv.hpp"

namespace fs = std::filesystem;
using namespace gibbstv;

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<long> seed_override;
  std::optional<long> reps_override;
  std::optional<double> tol_override;
  std::string trajectory_path;
};

void add_common(CLI::App* cmd, CommonArgs* args, bool with_dump = false) {
  cmd->add_option("--scenario", args->scenario_path, "scenario JSON file")->required();
  cmd->add_option("--out", args->out_dir, "output directory (default: .)");
  cmd->add_option("--seed", args->seed_override, "override mc.seed");
  cmd->add_option("--reps", args->reps_override, "override mc.reps");
  cmd->add_option("--tol", args->tol_override, "override mc.tol");
  if (with_dump)
    cmd->add_option("--dump-trajectory", args->trajectory_path,
                    "write one trajectory as JSON lines");
}

Scenario load(const CommonArgs& args) {
  Scenario s = load_scenario(args.scenario_path);
  if (args.seed_override) s.mc.seed = static_cast<std::uint64_t>(*args.seed_override);
  if (args.reps_override) s.mc.reps = *args.reps_override;
  if (args.tol_override) s.mc.tol = *args.tol_override;
  return s;
}

void write_json(const CommonArgs& args, const std::string& name, const json& j) {
  fs::create_directories(args.out_dir);
  std::ofstream out(fs::path(args.out_dir) / name);
  out << j.dump(2) << '\n';
}

JumpHook make_dump_hook(std::ofstream& os) {
  return [&os](const JumpEvent& ev) {
    json rec{{"t", ev.t},
             {"kind", ev.birth ? "birth" : "death"},
             {"point", ev.point},
             {"chain", ev.chain == 2 ? "both" : (ev.chain == 0 ? "xi" : "eta")}};
    os << rec.dump() << '\n';
  };
}

int run_bound(const CommonArgs& args) {
  Scenario s = load(args);
  std::vector<PointConfig> xi_samples, h_samples;
  const std::vector<PointConfig>* xp = nullptr;
  const std::vector<PointConfig>* hp = nullptr;
  if (s.mode == IntensityMode::MonteCarlo) {
    CounterRng root(s.mc.seed);
    auto pair = detail::simulable_pair(s);
    xi_samples = sample_equilibrium(pair.xi, s.mc.burn_in, s.mc.reps, s.mc.spacing,
                                    root.stream(11).next_u64());
    h_samples = sample_equilibrium(pair.h, s.mc.burn_in, s.mc.reps, s.mc.spacing,
                                   root.stream(12).next_u64());
    xp = &xi_samples;
    hp = &h_samples;
  }
  std::vector<BoundReport> rows;
  BoundReport rep;
  if (s.theorem == TheoremId::GeneralPip && !s.k_sweep.empty()) {
    McInputs mc;
    mc.xi_samples = xp;
    mc.h_samples = hp;
    mc.cstar_star = s.cstar_star;
    mc.moment_xi = s.moment_xi;
    mc.moment_h = s.moment_h;
    rep = tv_bound_general_pip_sweep(
        *s.xi, *s.h, s.k_sweep,
        s.delta_sweep.empty() ? std::vector<double>{s.delta} : s.delta_sweep, s.mode, mc,
        &rows);
  } else {
    rep = scenario_bound(s, xp, hp);
    rows.push_back(rep);
  }
  write_json(args, "report.json", to_json(rep));
  if (rows.size() > 1) {
    fs::create_directories(args.out_dir);
    std::ofstream csv(fs::path(args.out_dir) / "sweep.csv");
    write_sweep_csv(csv, rows);
  }
  std::cout << s.name << ": bound = " << rep.bound << (rep.vacuous ? " (vacuous)" : "")
            << "\n";
  return rep.vacuous ? 2 : 0;
}

int run_simulate(const CommonArgs& args) {
  Scenario s = load(args);
  if (!s.xi) throw ParameterError("simulate: scenario needs model_xi");
  if (!args.trajectory_path.empty()) {
    std::ofstream os(args.trajectory_path);
    auto hook = make_dump_hook(os);
    auto st = simulate(*s.xi, PointConfig(), s.horizon, s.mc.seed, hook);
    std::cout << "trajectory to t=" << s.horizon << ": " << st.jump_count
              << " jumps, |Z(T)|=" << st.config.size() << "\n";
  }
  EquilibriumDiag diag;
  auto samples =
      sample_equilibrium(*s.xi, s.mc.burn_in, s.mc.reps, s.mc.spacing, s.mc.seed, &diag);
  double mean = 0, m2 = 0;
  std::size_t cmin = static_cast<std::size_t>(-1), cmax = 0;
  for (const auto& c : samples) {
    mean += c.size();
    m2 += static_cast<double>(c.size()) * c.size();
    cmin = std::min(cmin, c.size());
    cmax = std::max(cmax, c.size());
  }
  mean /= static_cast<double>(samples.size());
  json rep{{"scenario", s.name},
           {"model", to_json(*s.xi)},
           {"samples", samples.size()},
           {"burn_in", s.mc.burn_in},
           {"spacing", s.mc.spacing},
           {"seed", s.mc.seed},
           {"count_mean", mean},
           {"count_sd", std::sqrt(std::max(m2 / samples.size() - mean * mean, 0.0))},
           {"count_min", cmin},
           {"count_max", cmax}};
  write_json(args, "report.json", rep);
  std::cout << s.name << ": " << samples.size() << " samples, mean count " << mean << "\n";
  return 0;
}

int run_couple(const CommonArgs& args) {
  Scenario s = load(args);
  const Model& m = s.h ? *s.h : *s.xi;
  CounterRng root(s.mc.seed);
  auto starts = sample_equilibrium(m, s.mc.burn_in, 1, s.mc.spacing,
                                   root.stream(1).next_u64());
  PointConfig xi0 = starts[0];
  CounterRng pos = root.stream(2);
  Point extra(m.window.dim);
  for (int i = 0; i < m.window.dim; ++i)
    extra[i] = pos.uniform(m.window.lower[i], m.window.upper[i]);
  PointConfig eta0 = xi0.with(extra);

  if (!args.trajectory_path.empty()) {
    std::ofstream os(args.trajectory_path);
    auto hook = make_dump_hook(os);
    couple(m, xi0, eta0, root.stream(3).next_u64(), 1'000'000, hook);
  }
  auto mt = mean_coupling_time(m, xi0, eta0, s.mc.reps, root.stream(4).next_u64());
  auto sp = stein_params_for(m);
  json rep{{"scenario", s.name},
           {"model", to_json(m)},
           {"reps", s.mc.reps},
           {"mean_tau", mt.mean},
           {"se_tau", mt.stderr_},
           {"timeout_fraction", mt.timeout_fraction},
           {"timeout_flagged", mt.flagged},
           {"stein", to_json(sp)},
           {"mean_within_bound", mt.mean <= sp.c1 + 3.0 * mt.stderr_}};
  write_json(args, "report.json", rep);
  std::cout << s.name << ": mean tau = " << mt.mean << " (c1 bound " << sp.c1 << ")\n";
  return mt.mean <= sp.c1 + 3.0 * mt.stderr_ ? 0 : 1;
}

int run_discretize(const CommonArgs& args) {
  Scenario s = load(args);
  if (!s.xi) throw ParameterError("discretize: scenario needs model_xi");
  std::vector<int> ns = s.n_sweep.empty() ? std::vector<int>{s.n_per_dim} : s.n_sweep;
  std::vector<BoundReport> rows;
  CounterRng root(s.mc.seed);
  bool all_vacuous = true;
  auto d2_stats = make_d2_statistics(s.xi->window, s.count_cap, {0.1, 0.3});
  for (int n : ns) {
    auto p = build_grid_partition(s.xi->window, n);
    std::vector<LatticeConfig> lat;
    BoundReport rep;
    if (s.mode == IntensityMode::MonteCarlo) {
      lat = sample_lattice_equilibrium(p, *s.xi, s.mc.burn_in, s.mc.reps, s.mc.spacing,
                                       root.stream(100 + n).next_u64());
      rep = d2_bound_discrete(*s.xi, p, s.mode, {}, &lat);
    } else {
      rep = d2_bound_discrete(*s.xi, p, s.mode);
    }
    rep.intermediates["n_per_dim"] = n;
    if (s.mc.reps > 0) {
      if (lat.empty())
        lat = sample_lattice_equilibrium(p, *s.xi, s.mc.burn_in, s.mc.reps, s.mc.spacing,
                                         root.stream(100 + n).next_u64());
      std::vector<PointConfig> lat_pts;
      lat_pts.reserve(lat.size());
      for (const auto& cfg : lat) lat_pts.push_back(lattice_points(p, cfg));
      auto cont = sample_equilibrium(*s.xi, s.mc.burn_in, s.mc.reps, s.mc.spacing,
                                     root.stream(200 + n).next_u64());
      auto emp = empirical_discrepancy(lat_pts, cont, d2_stats, false);
      rep.intermediates["empirical_d2_lower"] = emp.lower;
      rep.intermediates["empirical_d2_se"] = emp.se;
    }
    all_vacuous = all_vacuous && rep.vacuous;
    rows.push_back(std::move(rep));
  }
  json out = to_json(rows.back());
  out["partition"] = to_json(build_grid_partition(s.xi->window, ns.back()));
  write_json(args, "report.json", out);
  fs::create_directories(args.out_dir);
  std::ofstream csv(fs::path(args.out_dir) / "sweep.csv");
  write_sweep_csv(csv, rows);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::cout << s.name << " n=" << ns[i] << ": d2 bound = " << rows[i].bound
              << (rows[i].vacuous ? " (vacuous)" : "") << "\n";
  return all_vacuous ? 2 : 0;
}

int run_verify(const CommonArgs& args) {
  Scenario s = load(args);
  auto rep = verify_bounds_report(s);
  write_json(args, "report.json", to_json(rep));
  std::cout << s.name << ": bound = " << rep.theoretical.bound
            << ", empirical lower = " << rep.empirical_lower
            << (rep.ordering_ok ? " (ordering ok)" : " (ORDERING VIOLATED)") << "\n";
  if (!rep.ordering_ok) return 1;
  return rep.theoretical.vacuous ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"total variation bounds between Gibbs point process distributions"};
  app.require_subcommand(1);

  CommonArgs bound_args, sim_args, couple_args, disc_args, verify_args;
  auto* cmd_bound = app.add_subcommand("bound", "evaluate a theorem bound");
  add_common(cmd_bound, &bound_args);
  auto* cmd_sim = app.add_subcommand("simulate", "spatial birth-death equilibrium samples");
  add_common(cmd_sim, &sim_args, true);
  auto* cmd_couple = app.add_subcommand("couple", "coupling times against the c1 bound");
  add_common(cmd_couple, &couple_args, true);
  auto* cmd_disc = app.add_subcommand("discretize", "lattice d2 bounds over a grid sweep");
  add_common(cmd_disc, &disc_args);
  auto* cmd_verify = app.add_subcommand("verify", "bound vs empirical verification report");
  add_common(cmd_verify, &verify_args);

  CLI11_PARSE(app, argc, argv);
  try {
    if (cmd_bound->parsed()) return run_bound(bound_args);
    if (cmd_sim->parsed()) return run_simulate(sim_args);
    if (cmd_couple->parsed()) return run_couple(couple_args);
    if (cmd_disc->parsed()) return run_discretize(disc_args);
    if (cmd_verify->parsed()) return run_verify(verify_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
