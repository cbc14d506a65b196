/// @file solver.hpp
/// Time integration of the coupled system: implicit mapped-grid
/// Navier-Stokes, a Fourier-diagonal damped beam, their coupling, initial
/// data construction and contact detection.
#pragma once

#include <functional>
#include <optional>

#include "beamfsi/fields.hpp"
#include "beamfsi/model.hpp"

namespace beamfsi {

// ---- beam ------------------------------------------------------------------

/// One theta-scheme step of rho_s eta'' - beta eta_xx - gamma eta_xxt + alpha eta_xxxx = phi,
/// mode by mode.  theta = 1/2 is the trapezoid rule, theta = 1 backward Euler.
/// The zero Fourier mode of phi is ignored.
BeamState beam_step(const BeamState& s, const Vec& phi, double dt, const Params& p,
                    double theta = 0.5);

/// beta |eta_x|^2 + alpha |eta_xx|^2 integrated, spectrally.
double beam_stiffness_norm_sq(const Vec& eta, const Params& p);
double damping_rate(const Vec& eta_dot, const Params& p);

// ---- fluid -----------------------------------------------------------------

struct FluidStepResult {
  FluidState state;
  Vec top_residual;  // momentum residual on the beam rows
  double div_max = 0.0;
  double cfl = 0.0;
};

/// One implicit step from heights h_old to h_new with Dirichlet beam
/// velocity on the top row.  The pressure is returned mean-free.
FluidStepResult fluid_step(const FluidState& prev, const Vec& h_old, const Vec& h_new,
                           const Vec& top_velocity, double dt, const Params& p,
                           const Vec* force = nullptr);

struct Traction {
  Vec phi;             // mean-free load per unit length
  double gauge = 0.0;  // removed constant mode
};

/// Load on the beam as the momentum residual of the beam rows, phi dx = -R.
Traction traction_from_residual(const Vec& top_residual, double dx);
Traction traction_on_beam(const FluidState& fluid, const FluidState& prev, const Vec& h_old,
                          const Vec& h_new, double dt, const Params& p,
                          const Vec* force = nullptr);

/// Largest cell divergence |div u| on the mapped grid (cell integral over cell area).
double max_divergence(const FluidState& f, const Vec& h);
double fluid_kinetic_energy(const FluidState& f, const Vec& h, const Params& p);
/// mu int |grad u|^2 with the discrete gradient of the solver.
double viscous_dissipation_rate(const FluidState& f, const Vec& h, const Params& p);

// ---- coupling --------------------------------------------------------------

enum class CouplingMode { Monolithic, Partitioned };

struct CouplingConfig {
  CouplingMode mode = CouplingMode::Monolithic;
  double tolerance = 1e-8;  // relative interface-velocity residual
  int max_iterations = 100;
  double omega0 = 0.5;  // first Aitken relaxation factor
};

struct StepReport {
  int iterations = 0;
  std::vector<double> residual_history;
  double gauge = 0.0;
  double div_max = 0.0;
  double mean_eta_dot = 0.0;
  double trace_mismatch = 0.0;
  double cfl = 0.0;
  double viscous_increment = 0.0;  // dt mu int |grad u|^2 at the new state
  double damping_increment = 0.0;  // dt gamma int |eta_xt|^2 at the new state
};

struct StepOutcome {
  SimState state;
  StepReport report;
};

/// Backward-Euler coupled step; the geometry h = h^n + dt eta_dot^{n+1} is
/// iterated to a fixed point.  Throws NumericalError on non-convergence.
StepOutcome coupled_step(const SimState& s, double dt, const Params& p, const CouplingConfig& c,
                         const Vec* force = nullptr);

std::optional<ContactEvent> detect_contact(const SimState& s, double eps_c,
                                           ContactPhase phase = ContactPhase::Halted);

// ---- initial data ----------------------------------------------------------

struct InitialData {
  Vec eta0;
  Vec eta1;
  FluidState u0;
};

struct InitialDataReport {
  double min_height = 0.0;
  double mean_eta1 = 0.0;
  double max_divergence = 0.0;
  double trace_mismatch = 0.0;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

InitialDataReport check_initial_data(const InitialData& d, double tolerance = 1e-10);
/// Throws ConfigError listing every violated condition.
void validate_initial_data(const InitialData& d, double tolerance = 1e-10);

/// Stream function at the solver corners (x_{i+1/2}, z_k), nx*(nz+1) values
/// indexed f*(nz+1)+k, obtained by integrating u1 up each face column.
Vec corner_stream(const FluidState& f, const Vec& h);
/// Exactly solenoidal state from corner stream values; the top row fixes
/// the beam velocity as its x-difference.
FluidState state_from_corner_stream(const FluidGrid& g, const Vec& h, const Vec& psi);

/// Solver-grid version of curl(b(x) zeta(y/lambda)).
FluidState lift_state(const FluidGrid& g, const Vec& eta1, const Vec& h, double lambda);

struct RegularizeReport {
  double lambda = 0.0;
  double sigma = 1.0;
  double h2_constant = 0.0;
  double min_height = 0.0;
};

InitialData regularize_initial_data(const InitialData& d, double gamma, const Params& p,
                                    RegularizeReport* report = nullptr);

/// Solver state extended to the container by stream-function sampling.
ExtendedField extend_state(const FluidState& f, const BeamState& b, const ContainerGrid& g);
/// Container matching the solver x-grid and the height bound M.
ContainerGrid container_for(const FluidGrid& g, double M, int cells_per_unit);

// ---- energy ----------------------------------------------------------------

struct EnergyTerms {
  double fluid_kinetic = 0.0;
  double beam_kinetic = 0.0;
  double elastic = 0.0;
  double total() const { return fluid_kinetic + beam_kinetic + elastic; }
};

EnergyTerms energy_terms(const SimState& s, const Params& p);

// ---- runs ------------------------------------------------------------------

struct RunConfig {
  Params params;
  FluidGrid grid;
  double dt = 1e-3;
  double T = 1.0;
  CouplingConfig coupling;
  double eps_c = 0.0;  // 0 selects 1e-6 * initial min height
  ContactPhase policy = ContactPhase::Halted;
  int sample_every = 1;
  bool adaptive_dt = false;
  double cfl_safety = 0.5;
};

struct StepRecord {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  EnergyTerms energy;
  double viscous_increment = 0.0;
  double damping_increment = 0.0;
  int iterations = 0;
  double gauge = 0.0;
  double div_max = 0.0;
  double mean_eta_dot = 0.0;
  double trace_mismatch = 0.0;
  double min_height = 0.0;
  double volume = 0.0;  // int eta dx
};

struct Trajectory {
  std::vector<SimState> samples;
  std::vector<StepRecord> records;  // record 0 describes the initial state
  std::vector<ContactEvent> events;
  bool halted = false;
};

/// Called after the initial state and after every accepted step.
using StepObserver = std::function<void(const SimState&, const StepRecord&, bool sampled)>;

SimState initial_state(const InitialData& d);
StepRecord describe(const SimState& s, const Params& p);
Trajectory run(const RunConfig& cfg, const SimState& init, const StepObserver& observer = {});

}  // namespace beamfsi
