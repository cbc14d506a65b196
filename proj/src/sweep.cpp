#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "beamfsi/csv.hpp"
#include "beamfsi/diagnostics.hpp"

namespace beamfsi {

namespace {

Vec time_weights(const Vec& t) {
  if (t.size() == 1) return {1.0};
  Vec w(t.size(), 0.0);
  for (size_t k = 0; k + 1 < t.size(); ++k) {
    w[k] += 0.5 * (t[k + 1] - t[k]);
    w[k + 1] += 0.5 * (t[k + 1] - t[k]);
  }
  return w;
}

bool strictly_decreasing(const Vec& v) {
  for (size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

}  // namespace

SweepReport gamma_sweep(const RunConfig& base, const InitialData& data, const Vec& gammas,
                        const SweepOptions& opt) {
  require(!gammas.empty(), "gamma_sweep: empty gamma list");
  for (size_t k = 0; k < gammas.size(); ++k) {
    require(gammas[k] >= 0.0, "gamma_sweep: gammas must be nonnegative");
    if (k > 0) require(gammas[k] < gammas[k - 1], "gamma_sweep: gammas must strictly decrease");
  }
  validate_initial_data(data);

  const int n = static_cast<int>(gammas.size());
  SweepReport rep;
  rep.members.resize(n);
  std::vector<std::string> errors(n);
  const int threads = opt.workers > 0 ? opt.workers : omp_get_max_threads();

  // infeasible regularizations surface as ConfigError before any run starts
  std::vector<InitialData> starts(n, data);
  for (int m = 0; m < n; ++m) {
    RunConfig cfg = base;
    cfg.params.gamma = gammas[m];
    if (opt.regularize && gammas[m] > 0.0) starts[m] = regularize_initial_data(data, gammas[m], cfg.params);
  }

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int m = 0; m < n; ++m) {
    try {
      RunConfig cfg = base;
      cfg.params.gamma = gammas[m];
      SweepMember& mem = rep.members[m];
      mem.gamma = gammas[m];
      mem.trajectory = run(cfg, initial_state(starts[m]));
    } catch (const std::exception& e) {
      errors[m] = e.what();
    }
  }
  for (int m = 0; m < n; ++m) {
    if (!errors[m].empty()) {
      throw NumericalError("gamma_sweep: member gamma = " + std::to_string(gammas[m]) +
                           " failed: " + errors[m]);
    }
  }

  double hmax = 0.0;
  for (auto& mem : rep.members) {
    mem.ledger = energy_ledger(mem.trajectory.records);
    mem.initial_energy = mem.ledger.initial;
    mem.min_height = 1e300;
    for (const auto& r : mem.trajectory.records) {
      mem.min_height = std::min(mem.min_height, r.min_height);
      mem.max_energy = std::max(mem.max_energy, r.energy.total());
    }
    for (const auto& s : mem.trajectory.samples) {
      const Vec h = s.height();
      hmax = std::max(hmax, *std::max_element(h.begin(), h.end()));
    }
  }

  const auto& ref = rep.members.front().trajectory.samples;
  for (const auto& mem : rep.members) {
    if (mem.trajectory.samples.size() != ref.size()) {
      throw NumericalError("gamma_sweep: members stored different sample counts");
    }
  }
  for (const auto& s : ref) rep.times.push_back(s.t);
  const Vec tw = time_weights(rep.times);

  const ContainerGrid cg = container_for(base.grid, std::max(opt.M, hmax), opt.cells_per_unit);
  std::vector<std::vector<ExtendedField>> ext(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int m = 0; m < n; ++m) {
    for (const auto& s : rep.members[m].trajectory.samples)
      ext[m].push_back(extend_state(s.fluid, s.beam, cg));
    rep.members[m].l4 = l4_bound_check(ext[m], rep.times);
  }

  rep.fluid_pairwise.assign(n, std::vector<double>(n, 0.0));
  rep.beam_pairwise.assign(n, std::vector<double>(n, 0.0));
  const double dx = base.grid.dx();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      double f = 0.0, s = 0.0;
      for (size_t k = 0; k < rep.times.size(); ++k) {
        const CouplePair pa{ext[a][k], {}}, pb{ext[b][k], {}};
        const CouplePair d = difference(pa, pb);
        f += tw[k] * x0_inner(d, d, 1.0, 0.0);
        const Vec& va = rep.members[a].trajectory.samples[k].beam.eta_dot;
        const Vec& vb = rep.members[b].trajectory.samples[k].beam.eta_dot;
        double acc = 0.0;
        for (size_t i = 0; i < va.size(); ++i) acc += (va[i] - vb[i]) * (va[i] - vb[i]);
        s += tw[k] * acc * dx;
      }
      rep.fluid_pairwise[a][b] = rep.fluid_pairwise[b][a] = std::sqrt(f);
      rep.beam_pairwise[a][b] = rep.beam_pairwise[b][a] = std::sqrt(s);
    }
  for (int a = 0; a + 1 < n; ++a) {
    rep.fluid_cauchy.push_back(rep.fluid_pairwise[a][a + 1]);
    rep.beam_cauchy.push_back(rep.beam_pairwise[a][a + 1]);
  }
  rep.fluid_decreasing = strictly_decreasing(rep.fluid_cauchy);
  rep.beam_decreasing = strictly_decreasing(rep.beam_cauchy);

  rep.positivity_ok = true;
  for (const auto& mem : rep.members)
    if (mem.gamma > 0.0 && !(mem.min_height > 0.0)) rep.positivity_ok = false;

  // the finest member stands in for the limit: energy plus viscous dissipation
  // stays below the energy of the unregularized data
  rep.unregularized_energy = energy_terms(initial_state(data), base.params).total();
  const EnergyLedger& fine = rep.members.back().ledger;
  rep.limit_energy_ok = true;
  for (const auto& r : fine.rows) {
    if (r.energy.total() + r.viscous > rep.unregularized_energy * (1.0 + 1e-9) + 1e-300)
      rep.limit_energy_ok = false;
  }

  std::vector<TimedProfile> traj;
  for (const auto& s : rep.members.back().trajectory.samples)
    traj.push_back({s.t, Profile::from_values(s.height(), base.grid.L)});
  try {
    rep.envelope = build_lower_envelope(traj, opt.delta);
  } catch (const Error& e) {
    rep.envelope_error = e.what();
  }
  return rep;
}

void write_sweep_report(const SweepReport& r, const std::filesystem::path& dir,
                        const std::string& config_hash) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "tables");
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["sample_times"] = r.times.size();
  j["members"] = nlohmann::json::array();
  for (const auto& m : r.members) {
    nlohmann::json jm;
    jm["gamma"] = m.gamma;
    jm["min_height"] = m.min_height;
    jm["initial_energy"] = m.initial_energy;
    jm["max_energy"] = m.max_energy;
    jm["ledger_max_abs_relative"] = m.ledger.max_abs_relative();
    jm["ledger_final_relative"] = m.ledger.final_relative();
    jm["ledger_dissipative"] = m.ledger.dissipative();
    jm["l4"] = m.l4.l4;
    jm["l4_interpolation_ratio"] = m.l4.max_ratio;
    jm["halted"] = m.trajectory.halted;
    jm["contact_events"] = m.trajectory.events.size();
    j["members"].push_back(jm);
  }
  j["fluid_cauchy"] = r.fluid_cauchy;
  j["beam_cauchy"] = r.beam_cauchy;
  j["fluid_pairwise"] = r.fluid_pairwise;
  j["beam_pairwise"] = r.beam_pairwise;
  j["fluid_cauchy_decreasing"] = r.fluid_decreasing;
  j["beam_cauchy_decreasing"] = r.beam_decreasing;
  j["positivity_ok"] = r.positivity_ok;
  j["unregularized_energy"] = r.unregularized_energy;
  j["limit_energy_ok"] = r.limit_energy_ok;
  j["norms"] = "fluid differences: unweighted L2 over container x time of extended velocities";
  if (r.envelope) {
    const auto& e = *r.envelope;
    j["envelope"] = {{"source", "finest-gamma trajectory"},
                     {"delta", e.delta},
                     {"epsilon", e.epsilon},
                     {"N", e.N},
                     {"theta", e.theta},
                     {"hoelder_C", e.hoelder_C},
                     {"below_violations", e.check.below_violations},
                     {"gap_violations", e.check.gap_violations}};
    save_envelope(e, dir / "tables", "envelope");
  } else {
    j["envelope"] = {{"error", r.envelope_error}};
  }
  std::ofstream(dir / "sweep_report.json") << j.dump(2) << '\n';

  csv::Table members;
  members.header = {"gamma", "min_height", "initial_energy", "max_energy",
                    "ledger_max_abs_relative", "l4"};
  members.columns.assign(members.header.size(), Vec{});
  for (const auto& m : r.members) {
    members.columns[0].push_back(m.gamma);
    members.columns[1].push_back(m.min_height);
    members.columns[2].push_back(m.initial_energy);
    members.columns[3].push_back(m.max_energy);
    members.columns[4].push_back(m.ledger.max_abs_relative());
    members.columns[5].push_back(m.l4.l4);
  }
  members.tags = {{"config_hash", config_hash}};
  csv::write(dir / "tables" / "members.csv", members);

  csv::Table cauchy;
  cauchy.header = {"gamma_a", "gamma_b", "fluid_l2", "beam_l2"};
  cauchy.columns.assign(4, Vec{});
  for (size_t k = 0; k < r.fluid_cauchy.size(); ++k) {
    cauchy.columns[0].push_back(r.members[k].gamma);
    cauchy.columns[1].push_back(r.members[k + 1].gamma);
    cauchy.columns[2].push_back(r.fluid_cauchy[k]);
    cauchy.columns[3].push_back(r.beam_cauchy[k]);
  }
  cauchy.tags = {{"config_hash", config_hash}};
  csv::write(dir / "tables" / "cauchy.csv", cauchy);

  csv::Table minh;
  minh.header = {"t"};
  minh.columns.push_back(r.times);
  for (const auto& m : r.members) {
    minh.header.push_back("min_h_gamma_" + csv::format(m.gamma));
    Vec col;
    for (const auto& s : m.trajectory.samples) {
      const Vec h = s.height();
      col.push_back(*std::min_element(h.begin(), h.end()));
    }
    minh.columns.push_back(col);
  }
  minh.tags = {{"config_hash", config_hash}};
  csv::write(dir / "tables" / "min_height.csv", minh);
}

}  // namespace beamfsi
