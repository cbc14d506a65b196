#include <algorithm>
#include <cmath>

#include "beamfsi/solver.hpp"
#include "beamfsi/spectral.hpp"

namespace beamfsi {

SimState initial_state(const InitialData& d) {
  validate_initial_data(d);
  SimState s;
  s.fluid = d.u0;
  s.fluid.p.assign(d.u0.grid.np(), 0.0);
  s.beam.eta = d.eta0;
  s.beam.eta_dot = d.eta1;
  return s;
}

StepRecord describe(const SimState& s, const Params& p) {
  StepRecord r;
  r.step = s.step;
  r.t = s.t;
  r.energy = energy_terms(s, p);
  const Vec h = s.height();
  r.min_height = *std::min_element(h.begin(), h.end());
  r.div_max = r.min_height > 0.0 ? max_divergence(s.fluid, h) : 0.0;
  r.mean_eta_dot = spectral::mean(s.beam.eta_dot);
  r.volume = spectral::mean(s.beam.eta) * p.L;
  double tm = 0.0;
  for (int i = 0; i < s.fluid.grid.nx; ++i)
    tm = std::max(tm, std::abs(s.fluid.u2(i, s.fluid.grid.nz) - s.beam.eta_dot[i]));
  r.trace_mismatch = tm;
  return r;
}

namespace {

double adaptive_dt(const RunConfig& cfg, const SimState& s) {
  const FluidGrid& g = s.fluid.grid;
  const Vec h = s.height();
  const double hmin = *std::min_element(h.begin(), h.end());
  double rate = 0.0;
  for (int r = 0; r < g.nu(); ++r) {
    const double len = r < g.n1() ? g.dx() : hmin * g.dz();
    rate = std::max(rate, std::abs(s.fluid.u[r]) / len);
  }
  if (rate == 0.0) return cfg.dt;
  return std::min(cfg.dt, cfg.cfl_safety / rate);
}

}  // namespace

Trajectory run(const RunConfig& cfg, const SimState& init, const StepObserver& observer) {
  cfg.params.validate();
  require(cfg.dt > 0.0 && cfg.T >= 0.0, "run: dt must be positive and T nonnegative");
  require(cfg.sample_every >= 1, "run: sample_every must be at least 1");
  require(init.fluid.grid == cfg.grid, "run: initial state grid differs from the config grid");

  Trajectory tr;
  const Vec h0 = init.height();
  const double h0min = *std::min_element(h0.begin(), h0.end());
  const double eps_c = cfg.eps_c > 0.0 ? cfg.eps_c : 1e-6 * h0min;

  SimState s = init;
  StepRecord r0 = describe(s, cfg.params);
  tr.records.push_back(r0);
  tr.samples.push_back(s);
  if (observer) observer(s, r0, true);
  if (auto e = detect_contact(s, eps_c, cfg.policy)) {
    tr.events.push_back(*e);
    tr.halted = true;
    return tr;
  }

  const double t_end = cfg.T;
  while (s.t < t_end - 1e-9 * cfg.dt) {
    double dt = cfg.adaptive_dt ? adaptive_dt(cfg, s) : cfg.dt;
    if (s.t + dt > t_end - 1e-9 * cfg.dt) dt = t_end - s.t;
    const double hmin_old = tr.records.back().min_height;

    StepOutcome out;
    try {
      out = coupled_step(s, dt, cfg.params, cfg.coupling);
    } catch (const NumericalError&) {
      // a step that collapses the channel counts as contact
      Vec hp = s.height();
      for (size_t i = 0; i < hp.size(); ++i) hp[i] += dt * s.beam.eta_dot[i];
      const auto it = std::min_element(hp.begin(), hp.end());
      if (*it > eps_c) throw;
      ContactEvent e;
      e.node = static_cast<int>(it - hp.begin());
      e.x = e.node * s.fluid.grid.dx();
      e.min_height = *it;
      e.time = s.t + dt * std::clamp((hmin_old - eps_c) / (hmin_old - *it), 0.0, 1.0);
      e.phase = cfg.policy;
      tr.events.push_back(e);
      tr.halted = true;
      return tr;
    }

    StepRecord rec = describe(out.state, cfg.params);
    rec.dt = dt;
    rec.viscous_increment = out.report.viscous_increment;
    rec.damping_increment = out.report.damping_increment;
    rec.iterations = out.report.iterations;
    rec.gauge = out.report.gauge;

    if (auto e = detect_contact(out.state, eps_c, cfg.policy)) {
      const double hmin_new = rec.min_height;
      e->time = s.t + dt * std::clamp((hmin_old - eps_c) / (hmin_old - hmin_new), 0.0, 1.0);
      tr.events.push_back(*e);
      tr.halted = true;
      return tr;
    }

    s = std::move(out.state);
    tr.records.push_back(rec);
    const bool last = !(s.t < t_end - 1e-9 * cfg.dt);
    const bool sampled = (s.step % cfg.sample_every == 0) || last;
    if (sampled) tr.samples.push_back(s);
    if (observer) observer(s, rec, sampled);
  }
  return tr;
}

}  // namespace beamfsi
