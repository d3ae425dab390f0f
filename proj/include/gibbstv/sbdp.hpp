#ifndef GIBBSTV_SBDP_HPP
#define GIBBSTV_SBDP_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "gibbstv/errors.hpp"
#include "gibbstv/model.hpp"
#include "gibbstv/point_config.hpp"
#include "gibbstv/rng.hpp"

namespace gibbstv {

// Spatial birth-death dynamics with birth kernel lambda(.|.) and unit
// per-capita death rate, realized by thinning: proposals arrive at the
// constant dominating rate sup(psi*) |X| plus one per living point, and a
// birth proposal at x is accepted with probability lambda(x|xi)/sup(psi*).
// Phantom (rejected) proposals leave the state unchanged, so the jump law
// of the continuous-time chain is exact; no time discretization anywhere.

struct JumpEvent {
  double t;
  bool birth;
  Point point;
  int chain;  // 0: xi, 1: eta, 2: both (single-chain runs always use 2)
};
using JumpHook = std::function<void(const JumpEvent&)>;

struct SbdpState {
  PointConfig config;
  double time = 0.0;
  long jump_count = 0;
  long proposals = 0;
  double acceptance_rate = 1.0;
  bool efficiency_warning = false;
};

namespace detail {

inline Point uniform_point(const Window& w, CounterRng& rng) {
  Point p(w.dim);
  for (int i = 0; i < w.dim; ++i) p[i] = rng.uniform(w.lower[i], w.upper[i]);
  return p;
}

}  // namespace detail

/// Run the SBDP started at xi0 up to the given horizon.
inline SbdpState simulate(const Model& m, const PointConfig& xi0, double horizon,
                          std::uint64_t seed, const JumpHook& hook = {}) {
  if (horizon < 0) throw ParameterError("simulate: negative horizon");
  const double psi_bar = envelope_sup(m);  // throws StabilityError if absent
  const double birth_rate = psi_bar * m.window.volume();
  CounterRng rng(seed);
  SbdpState st;
  st.config = xi0;
  long accepted = 0, birth_proposals = 0;
  double t = 0.0;
  while (true) {
    double rate = birth_rate + static_cast<double>(st.config.size());
    double dt = rng.exponential(rate);
    if (t + dt > horizon) break;
    t += dt;
    ++st.proposals;
    if (rng.uniform() < birth_rate / rate) {
      ++birth_proposals;
      Point x = detail::uniform_point(m.window, rng);
      double lam = cond_intensity(m, x, st.config);
      if (rng.uniform() < lam / psi_bar) {
        ++accepted;
        ++st.jump_count;
        if (hook) hook(JumpEvent{t, true, x, 2});
        st.config.add(std::move(x));
      }
    } else if (!st.config.empty()) {
      std::size_t i = rng.uniform_index(st.config.size());
      if (hook) hook(JumpEvent{t, false, st.config.points[i], 2});
      st.config.remove_at(i);
      ++st.jump_count;
    }
  }
  st.time = horizon;
  st.acceptance_rate =
      birth_proposals > 0 ? static_cast<double>(accepted) / birth_proposals : 1.0;
  st.efficiency_warning = birth_proposals > 1000 && st.acceptance_rate < 1e-6;
  return st;
}

struct EquilibriumDiag {
  std::vector<std::pair<double, std::size_t>> count_trace;  // (time, |Z(t)|) per jump
};

/// n configurations sampled from one trajectory at times burn_in + i*spacing.
inline std::vector<PointConfig> sample_equilibrium(const Model& m, double burn_in, long n,
                                                   double spacing, std::uint64_t seed,
                                                   EquilibriumDiag* diag = nullptr) {
  if (burn_in < 0 || spacing <= 0) throw ParameterError("sample_equilibrium: bad schedule");
  std::vector<PointConfig> out;
  if (n <= 0) return out;
  const double psi_bar = envelope_sup(m);
  const double birth_rate = psi_bar * m.window.volume();
  CounterRng rng(seed);
  PointConfig cfg;
  double t = 0.0;
  double next_sample = burn_in;
  long taken = 0;
  while (taken < n) {
    double rate = birth_rate + static_cast<double>(cfg.size());
    double dt = rng.exponential(rate);
    while (taken < n && t + dt > next_sample) {
      out.push_back(cfg);
      ++taken;
      next_sample += spacing;
    }
    if (taken >= n) break;
    t += dt;
    if (rng.uniform() < birth_rate / rate) {
      Point x = detail::uniform_point(m.window, rng);
      double lam = cond_intensity(m, x, cfg);
      if (rng.uniform() < lam / psi_bar) cfg.add(std::move(x));
    } else if (!cfg.empty()) {
      cfg.remove_at(rng.uniform_index(cfg.size()));
    }
    if (diag) diag->count_trace.emplace_back(t, cfg.size());
  }
  return out;
}

struct CouplingRecord {
  double tau = 0.0;
  bool timed_out = false;
  long jumps = 0;        // state-changing events
  long good_deaths = 0;  // deaths of non-common points
  long bad_births = 0;   // births accepted by exactly one chain
  int final_symdiff = 0;
};

namespace detail {

struct UnionEntry {
  Point pt;
  bool in_xi;
  bool in_eta;
};

/// Shared points are matched bit-exactly so they stay common forever.
inline std::vector<UnionEntry> build_union(const PointConfig& xi, const PointConfig& eta) {
  std::vector<UnionEntry> entries;
  std::vector<bool> used(eta.size(), false);
  for (const auto& p : xi.points) {
    bool matched = false;
    for (std::size_t j = 0; j < eta.size(); ++j)
      if (!used[j] && same_point(p, eta.points[j])) {
        used[j] = true;
        matched = true;
        break;
      }
    entries.push_back(UnionEntry{p, true, matched});
  }
  for (std::size_t j = 0; j < eta.size(); ++j)
    if (!used[j]) entries.push_back(UnionEntry{eta.points[j], false, true});
  return entries;
}

/// One step of the coupled jump chain; returns true if the state changed.
/// The birth position Y is drawn by rejection from the shared envelope, the
/// two acceptance indicators are maximally coupled given Y via one uniform.
template <typename OnEvent>
bool coupled_step(const Model& m, std::vector<UnionEntry>* entries, double birth_rate,
                  double psi_bar, CounterRng& rng, double* t, int* symdiff,
                  CouplingRecord* rec, std::vector<const Point*>* buf_xi,
                  std::vector<const Point*>* buf_eta, const OnEvent& on_event) {
  double rate = birth_rate + static_cast<double>(entries->size());
  *t += rng.exponential(rate);
  if (rng.uniform() < birth_rate / rate) {
    Point x = uniform_point(m.window, rng);
    buf_xi->clear();
    buf_eta->clear();
    for (const auto& e : *entries) {
      if (e.in_xi) buf_xi->push_back(&e.pt);
      if (e.in_eta) buf_eta->push_back(&e.pt);
    }
    double lx = cond_intensity_range(m, x, *buf_xi, buf_xi->size());
    double le = cond_intensity_range(m, x, *buf_eta, buf_eta->size());
    double lmax = std::max(lx, le);
    if (rng.uniform() >= lmax / psi_bar) return false;  // phantom proposal
    double v = rng.uniform();
    bool bx = v < lx / lmax;
    bool be = v < le / lmax;
    if (!bx && !be) return false;  // cannot happen: one ratio is 1
    if (bx != be) {
      ++rec->bad_births;
      ++*symdiff;
    }
    on_event(JumpEvent{*t, true, x, bx && be ? 2 : (bx ? 0 : 1)});
    entries->push_back(UnionEntry{std::move(x), bx, be});
    ++rec->jumps;
    return true;
  }
  if (entries->empty()) return false;
  std::size_t i = rng.uniform_index(entries->size());
  UnionEntry& e = (*entries)[i];
  if (e.in_xi != e.in_eta) {
    ++rec->good_deaths;
    --*symdiff;
  }
  on_event(JumpEvent{*t, false, e.pt, e.in_xi && e.in_eta ? 2 : (e.in_xi ? 0 : 1)});
  (*entries)[i] = std::move(entries->back());
  entries->pop_back();
  ++rec->jumps;
  return true;
}

}  // namespace detail

/// Run the coupled pair (Z_xi, Z_eta) until the configurations coincide or
/// the proposal budget is exhausted.
inline CouplingRecord couple(const Model& m, const PointConfig& xi, const PointConfig& eta,
                             std::uint64_t seed, long max_jumps = 1'000'000,
                             const JumpHook& hook = {}) {
  const double psi_bar = envelope_sup(m);
  const double birth_rate = psi_bar * m.window.volume();
  CounterRng rng(seed);
  auto entries = detail::build_union(xi, eta);
  int symdiff = 0;
  for (const auto& e : entries)
    if (e.in_xi != e.in_eta) ++symdiff;
  CouplingRecord rec;
  auto on_event = [&](const JumpEvent& ev) {
    if (hook) hook(ev);
  };
  double t = 0.0;
  if (symdiff == 0) {
    rec.tau = 0.0;
    return rec;
  }
  std::vector<const Point*> buf_xi, buf_eta;
  for (long proposals = 0; proposals < max_jumps; ++proposals) {
    detail::coupled_step(m, &entries, birth_rate, psi_bar, rng, &t, &symdiff, &rec,
                         &buf_xi, &buf_eta, on_event);
    if (symdiff == 0) {
      rec.tau = t;
      return rec;
    }
  }
  rec.timed_out = true;
  rec.tau = t;
  rec.final_symdiff = symdiff;
  return rec;
}

/// Run the coupled pair for a fixed time horizon (no stop at coalescence);
/// used to check that each marginal is the plain SBDP.
inline std::pair<PointConfig, PointConfig> couple_simulate(const Model& m,
                                                           const PointConfig& xi,
                                                           const PointConfig& eta,
                                                           double horizon,
                                                           std::uint64_t seed) {
  const double psi_bar = envelope_sup(m);
  const double birth_rate = psi_bar * m.window.volume();
  CounterRng rng(seed);
  auto entries = detail::build_union(xi, eta);
  int symdiff = 0;
  for (const auto& e : entries)
    if (e.in_xi != e.in_eta) ++symdiff;
  CouplingRecord rec;
  auto noop = [](const JumpEvent&) {};
  double t = 0.0;
  std::vector<const Point*> buf_xi, buf_eta;
  while (true) {
    // the holding-time draw is replayed on a copy so the horizon check can
    // happen before the step consumes it from the live stream
    double rate = birth_rate + static_cast<double>(entries.size());
    CounterRng probe = rng;
    double dt = probe.exponential(rate);
    if (t + dt > horizon) break;
    detail::coupled_step(m, &entries, birth_rate, psi_bar, rng, &t, &symdiff, &rec,
                         &buf_xi, &buf_eta, noop);
  }
  PointConfig out_xi, out_eta;
  for (auto& e : entries) {
    if (e.in_xi) out_xi.add(e.pt);
    if (e.in_eta) out_eta.add(e.pt);
  }
  return {std::move(out_xi), std::move(out_eta)};
}

struct MeanCouplingTime {
  double mean = 0.0;
  double stderr_ = 0.0;
  double timeout_fraction = 0.0;
  bool flagged = false;  // timeout_fraction > 0.01
};

/// Coupling time aggregated over replicas with per-replica streams;
/// timed-out replicas are excluded from the mean and reported.
inline MeanCouplingTime mean_coupling_time(const Model& m, const PointConfig& xi,
                                           const PointConfig& eta, long reps,
                                           std::uint64_t seed,
                                           long max_jumps = 1'000'000) {
  if (reps < 1) throw ParameterError("mean_coupling_time: reps must be >= 1");
  CounterRng root(seed);
  double sum = 0.0, sumsq = 0.0;
  long ok = 0, timeouts = 0;
  for (long rep = 0; rep < reps; ++rep) {
    auto rec = couple(m, xi, eta, root.stream(static_cast<std::uint64_t>(rep)).next_u64(),
                      max_jumps);
    if (rec.timed_out) {
      ++timeouts;
      continue;
    }
    sum += rec.tau;
    sumsq += rec.tau * rec.tau;
    ++ok;
  }
  MeanCouplingTime out;
  out.timeout_fraction = static_cast<double>(timeouts) / static_cast<double>(reps);
  out.flagged = out.timeout_fraction > 0.01;
  if (ok > 0) {
    out.mean = sum / ok;
    double var = std::max(sumsq / ok - out.mean * out.mean, 0.0);
    out.stderr_ = std::sqrt(var / ok);
  }
  return out;
}

}  // namespace gibbstv

#endif
