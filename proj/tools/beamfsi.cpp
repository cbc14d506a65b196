// Command-line front end: run, sweep, study-envelope, study-projector, validate.
#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "beamfsi/config.hpp"
#include "beamfsi/csv.hpp"
#include "beamfsi/diagnostics.hpp"
#include "beamfsi/store.hpp"

namespace fs = std::filesystem;
using namespace beamfsi;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3, kContact = 4 };

struct CliConfig {
  std::string subcommand;
  fs::path config;
  fs::path out;
  int verbosity = 0;
  int workers = 0;
  std::string gammas;
  std::optional<double> delta, dt;
  std::optional<int> nx, nz;
};

int g_verbosity = 0;

template <class... A>
void log(int level, const char* fmt, A... a) {
  if (level > g_verbosity) return;
  std::printf(fmt, a...);
  std::printf("\n");
  std::fflush(stdout);
}

Vec parse_list(const std::string& s) {
  Vec out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError("--gammas: not a number: '" + tok + "'");
    }
    if (used != tok.size()) throw ConfigError("--gammas: not a number: '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--gammas: empty list");
  return out;
}

config::SimConfig resolve(const CliConfig& c) {
  config::SimConfig s = config::load(c.config);
  if (c.nx) s.run.grid.nx = *c.nx;
  if (c.nz) s.run.grid.nz = *c.nz;
  if (c.dt) s.run.dt = *c.dt;
  if (c.delta) s.delta = *c.delta;
  if (!c.gammas.empty()) s.gammas = parse_list(c.gammas);
  if (c.workers > 0) s.workers = c.workers;
  s.validate();
  return s;
}

/// Claims the output directory: it must not exist or be empty.
void claim_output(const fs::path& out) {
  if (out.empty()) throw ConfigError("--out is required");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  if (!fs::create_directory(out) && !fs::is_empty(out)) {
    throw ConfigError("output directory exists and is not empty: " + out.string());
  }
  fs::create_directories(out / "tables");
}

void write_json(const fs::path& p, const nlohmann::json& j) { std::ofstream(p) << j.dump(2) << '\n'; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StepObserver progress(const StepObserver& inner, double T) {
  return [inner, T](const SimState& s, const StepRecord& r, bool sampled) {
    if (inner) inner(s, r, sampled);
    if (sampled) {
      log(1, "  t = %.6f / %.6f  E = %.6e  min h = %.4e  iterations = %d", s.t, T, r.energy.total(),
          r.min_height, r.iterations);
    }
  };
}

int cmd_validate(const CliConfig& c) {
  const config::SimConfig s = resolve(c);
  const InitialData d = config::build_initial_data(s);
  const InitialDataReport r = check_initial_data(d);
  log(0, "config ok: nx = %d, nz = %d, dt = %g, T = %g, gamma = %g", s.run.grid.nx, s.run.grid.nz,
      s.run.dt, s.run.T, s.run.params.gamma);
  log(0, "initial data: min height %.6g, mean eta1 %.3e, max divergence %.3e, trace mismatch %.3e",
      r.min_height, r.mean_eta1, r.max_divergence, r.trace_mismatch);
  log(0, "initial energy %.10e", energy_terms(initial_state(d), s.run.params).total());
  return kOk;
}

int cmd_run(const CliConfig& c) {
  const config::SimConfig s = resolve(c);
  const InitialData d = config::build_initial_data(s);
  claim_output(c.out);
  const std::string text = s.to_toml();
  store::RunWriter writer(c.out, s.run, text, s.checkpoint_every);
  log(0, "run: nx = %d, nz = %d, dt = %g, T = %g -> %s", s.run.grid.nx, s.run.grid.nz, s.run.dt,
      s.run.T, c.out.string().c_str());
  const auto t0 = std::chrono::steady_clock::now();
  Trajectory tr;
  try {
    tr = run(s.run, initial_state(d), progress(writer.observer(), s.run.T));
  } catch (const NumericalError&) {
    store::write_events_json(tr, c.out / "events.json");
    throw;
  }
  const auto& m = writer.finish(tr, seconds_since(t0));
  const EnergyLedger led = energy_ledger(tr.records);
  log(0, "done: %ld steps in %.2f s, energy residual %.3e (relative, max |.|), %zu contact events",
      m.steps, m.wall_seconds, led.max_abs_relative(), tr.events.size());
  if (tr.halted && !tr.events.empty() && tr.events.front().phase == ContactPhase::Halted) {
    const auto& e = tr.events.front();
    log(0, "contact: t = %.6f at x = %.4f (node %d), min height %.3e", e.time, e.x, e.node,
        e.min_height);
    return kContact;
  }
  return kOk;
}

int cmd_sweep(const CliConfig& c) {
  const config::SimConfig s = resolve(c);
  if (s.gammas.empty()) throw ConfigError("sweep: no gammas in [sweep] or --gammas");
  const InitialData d = config::raw_initial_data(s);
  claim_output(c.out);
  const std::string text = s.to_toml();
  const std::string hash = store::sha256_hex(text);
  log(0, "sweep over %zu gammas -> %s", s.gammas.size(), c.out.string().c_str());
  const auto t0 = std::chrono::steady_clock::now();
  const SweepReport r = gamma_sweep(s.run, d, s.gammas, config::sweep_options(s));
  write_sweep_report(r, c.out, hash);

  store::RunManifest m;
  m.config_text = text;
  m.config_hash = hash;
  m.code_version = store::code_version();
  m.grid_hash = store::grid_hash(s.run.grid);
  m.params_hash = store::params_hash(s.run.params);
  for (const auto& mem : r.members) {
    const std::string rel = "tables/ledger_gamma_" + csv::format(mem.gamma) + ".csv";
    store::write_ledger_csv(mem.trajectory, c.out / rel, hash);
    m.index(c.out, rel, "ledger");
    log(0, "  gamma = %-10g min h = %.4e  ledger max |rel| = %.3e  L4 = %.4e", mem.gamma,
        mem.min_height, mem.ledger.max_abs_relative(), mem.l4.l4);
  }
  m.index(c.out, "sweep_report.json", "report");
  for (const auto& e : fs::directory_iterator(c.out / "tables")) {
    const std::string rel = "tables/" + e.path().filename().string();
    if (rel.find("ledger_gamma_") == std::string::npos) m.index(c.out, rel, "table");
  }
  m.wall_seconds = seconds_since(t0);
  m.save(c.out / "manifest.json");
  for (size_t k = 0; k < r.fluid_cauchy.size(); ++k)
    log(0, "  cauchy %zu: fluid %.4e  beam %.4e", k, r.fluid_cauchy[k], r.beam_cauchy[k]);
  log(0, "fluid decreasing %s, beam decreasing %s, positivity %s",
      r.fluid_decreasing ? "yes" : "no", r.beam_decreasing ? "yes" : "no",
      r.positivity_ok ? "yes" : "no");
  return kOk;
}

/// The finest damping of the sweep list when one is given, else [params] gamma.
config::SimConfig finest_member(config::SimConfig s) {
  if (!s.gammas.empty()) {
    s.run.params.gamma = s.gammas.back();
    s.regularize = true;
  }
  return s;
}

int cmd_study_envelope(const CliConfig& c) {
  const config::SimConfig s = finest_member(resolve(c));
  const InitialData d = config::build_initial_data(s);
  claim_output(c.out);
  log(0, "study-envelope: gamma = %g", s.run.params.gamma);
  const Trajectory tr = run(s.run, initial_state(d), progress({}, s.run.T));
  std::vector<TimedProfile> traj;
  for (const auto& st : tr.samples) traj.push_back({st.t, Profile::from_values(st.height(), s.run.grid.L)});
  const Vec deltas = c.delta ? Vec{*c.delta} : Vec{0.2, 0.1, 0.05};
  nlohmann::json j;
  j["config_hash"] = store::sha256_hex(s.to_toml());
  j["samples"] = traj.size();
  j["studies"] = nlohmann::json::array();
  csv::Table t;
  t.header = {"delta", "epsilon", "N", "below_violations", "gap_violations", "max_gap",
              "row_w1inf_max"};
  t.columns.assign(t.header.size(), Vec{});
  int status = kOk;
  for (double delta : deltas) {
    try {
      const LowerEnvelope e = build_lower_envelope(traj, delta);
      save_envelope(e, c.out / "tables", "envelope_delta_" + csv::format(delta));
      const double row[] = {delta, e.epsilon, double(e.N), double(e.check.below_violations),
                            double(e.check.gap_violations), e.check.max_gap, e.check.row_w1inf_max};
      for (size_t k = 0; k < t.header.size(); ++k) t.columns[k].push_back(row[k]);
      j["studies"].push_back({{"delta", delta},
                              {"epsilon", e.epsilon},
                              {"N", e.N},
                              {"below_violations", e.check.below_violations},
                              {"gap_violations", e.check.gap_violations},
                              {"max_gap", e.check.max_gap},
                              {"row_w1inf_max", e.check.row_w1inf_max}});
      log(0, "delta = %g: epsilon = %.4e, N = %lld, violations %lld / %lld, row W1inf max %.4f", delta,
          e.epsilon, e.N, e.check.below_violations, e.check.gap_violations, e.check.row_w1inf_max);
    } catch (const NumericalError& e) {
      j["studies"].push_back({{"delta", delta}, {"error", e.what()}});
      log(0, "delta = %g: %s", delta, e.what());
      status = kNumerical;
    }
  }
  t.tags = {{"config_hash", j["config_hash"].get<std::string>()}};
  csv::write(c.out / "tables" / "envelope_study.csv", t);
  write_json(c.out / "study_envelope.json", j);
  return status;
}

int cmd_study_projector(const CliConfig& c) {
  const config::SimConfig s = resolve(c);
  claim_output(c.out);
  const ProjectorSetup st = lift_pair_setup(s.run.grid.nx, s.run.grid.L, s.cells_per_unit);
  const SobolevConfig sc;
  const ProjectorStudy r = projector_error_study(st.pair, st.h, st.family, sc);
  csv::Table t;
  t.header = {"j", "gap", "error"};
  t.columns.assign(3, Vec{});
  nlohmann::json j;
  j["config_hash"] = store::sha256_hex(s.to_toml());
  j["s"] = sc.s;
  j["kappa"] = sc.kappa;
  j["rows"] = nlohmann::json::array();
  for (size_t k = 0; k < r.rows.size(); ++k) {
    const double jj = 2.0 + k;
    t.columns[0].push_back(jj);
    t.columns[1].push_back(r.rows[k].gap);
    t.columns[2].push_back(r.rows[k].error);
    j["rows"].push_back({{"j", jj}, {"gap", r.rows[k].gap}, {"error", r.rows[k].error}});
    log(0, "j = %.0f: gap %.4e, X^s error %.6e", jj, r.rows[k].gap, r.rows[k].error);
  }
  j["decreasing"] = r.decreasing;
  t.tags = {{"config_hash", j["config_hash"].get<std::string>()}};
  csv::write(c.out / "tables" / "projector.csv", t);
  write_json(c.out / "study_projector.json", j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beamfsi: fluid film under a damped elastic beam"};
  app.require_subcommand(1);
  CliConfig c;
  auto common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", c.config, "config file")->required()->check(CLI::ExistingFile);
    auto* o = sub->add_option("--out", c.out, "output directory");
    if (needs_out) o->required();
    sub->add_option("--gammas", c.gammas, "comma-separated damping values (overrides [sweep])");
    sub->add_option("--delta", c.delta, "envelope delta");
    sub->add_option("--dt", c.dt, "time step");
    sub->add_option("--nx", c.nx, "x cells");
    sub->add_option("--nz", c.nz, "z cells");
    sub->add_option("--workers", c.workers, "OpenMP threads");
    sub->add_flag_function(
        "-v,--verbose", [&](std::int64_t n) { c.verbosity = static_cast<int>(n); },
        "more output (repeatable)");
  };
  common(app.add_subcommand("run", "single run with checkpoints, ledger and events"), true);
  common(app.add_subcommand("sweep", "damping sweep with Cauchy diagnostics"), true);
  common(app.add_subcommand("study-envelope", "lower-envelope construction on a run"), true);
  common(app.add_subcommand("study-projector", "projector-competitor error decay"), true);
  common(app.add_subcommand("validate", "check config and initial data"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  g_verbosity = c.verbosity;
  if (c.workers > 0) omp_set_num_threads(c.workers);

  try {
    if (c.subcommand == "validate") return cmd_validate(c);
    if (c.subcommand == "run") return cmd_run(c);
    if (c.subcommand == "sweep") return cmd_sweep(c);
    if (c.subcommand == "study-envelope") return cmd_study_envelope(c);
    if (c.subcommand == "study-projector") return cmd_study_projector(c);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return c.subcommand == "validate" ? kConfig : kFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
