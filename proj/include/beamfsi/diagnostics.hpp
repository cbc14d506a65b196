/// @file diagnostics.hpp
/// Energy ledger, Korn and L4 checks, the damping sweep and the lemma studies.
#pragma once

#include <filesystem>

#include "beamfsi/geometry.hpp"
#include "beamfsi/solver.hpp"

namespace beamfsi {

struct LedgerRow {
  long step = 0;
  double t = 0.0;
  EnergyTerms energy;
  double viscous = 0.0;  // cumulative mu int int |grad u|^2
  double damping = 0.0;  // cumulative gamma int int |eta_xt|^2
  double residual = 0.0;  // energy + dissipation - initial energy
  double relative = 0.0;  // residual / initial energy (0 when the latter is 0)
};

struct EnergyLedger {
  double initial = 0.0;
  std::vector<LedgerRow> rows;

  double max_abs_relative() const;
  double final_relative() const;
  /// True when no residual exceeds round-off on the energy-creating side.
  bool dissipative(double roundoff = 1e-12) const;
};

EnergyLedger energy_ledger(const std::vector<StepRecord>& records);
/// Recomputes every term from stored states.  Cumulative dissipation uses
/// the states as right endpoints, which matches the scheme when every step is stored.
EnergyLedger energy_ledger(const std::vector<SimState>& states, const Params& p);

struct KornReport {
  double symmetric = 0.0;  // int |grad u + grad u^T|^2
  double gradient = 0.0;   // 2 int |grad u|^2
  double relative = 0.0;
};
KornReport korn_report(const FluidState& f, const Vec& h);
double korn_residual(const FluidState& f, const Vec& h);

struct L4Report {
  double l4 = 0.0;  // space-time L4 norm
  double l2 = 0.0;
  double max_ratio = 0.0;  // max_t ||u||_4^2 / (||u||_2 ||u||_H1)
  Vec per_time_l4;
};
/// Cell-centred |u| on the container; weights are the sample spacings.
L4Report l4_bound_check(const std::vector<ExtendedField>& fields, const Vec& times);
double l4_norm(const ExtendedField& w);

struct ComponentFlux {
  int first_node = 0;  // run of nodes with h > eps_c, may wrap
  int nodes = 0;
  double flux = 0.0;  // int eta_dot dx over the run
};
struct FluxReport {
  std::vector<ComponentFlux> components;
  double contact_flux = 0.0;  // nodes at or below eps_c
  double global_flux = 0.0;
};
FluxReport component_flux_report(const BeamState& b, double L, double eps_c);

struct ProjectorRow {
  double gap = 0.0;    // w1inf_distance(h, hb)
  double error = 0.0;  // X^s distance of the competitor to the input pair
};
struct ProjectorStudy {
  std::vector<ProjectorRow> rows;
  bool decreasing = false;  // strictly decreasing error along decreasing gaps
};
ProjectorStudy projector_error_study(const CouplePair& pair, const Profile& h,
                                     const std::vector<Profile>& family,
                                     const SobolevConfig& cfg);

struct ProjectorSetup {
  CouplePair pair;
  Profile h;
  std::vector<Profile> family;  // [h - 2^-j]_+, j = j_first..j_last
};
/// Discretely solenoidal lift of d = amplitude sin(2 pi x / L) (curl of the lift
/// stream) under h = 1 + 0.3 cos(2 pi x / L), extended to the container.
ProjectorSetup lift_pair_setup(int nx, double L, int cells_per_unit, double amplitude = 0.5,
                               int j_first = 2, int j_last = 8);

struct SweepOptions {
  double delta = 0.1;
  bool regularize = true;
  double M = 2.0;
  int cells_per_unit = 16;
  int workers = 0;  // 0 keeps the OpenMP default
};

struct SweepMember {
  double gamma = 0.0;
  Trajectory trajectory;
  EnergyLedger ledger;
  double min_height = 0.0;
  double initial_energy = 0.0;
  double max_energy = 0.0;
  L4Report l4;
};

struct SweepReport {
  std::vector<SweepMember> members;
  Vec times;
  Vec fluid_cauchy;  // ||u_i - u_{i+1}|| over container x time, successive members
  Vec beam_cauchy;   // ||eta_dot_i - eta_dot_{i+1}|| over (0,T) x (0,L)
  std::vector<std::vector<double>> fluid_pairwise;
  std::vector<std::vector<double>> beam_pairwise;
  double unregularized_energy = 0.0;
  bool limit_energy_ok = false;
  bool positivity_ok = false;
  bool fluid_decreasing = false;
  bool beam_decreasing = false;
  std::optional<LowerEnvelope> envelope;
  std::string envelope_error;
};

SweepReport gamma_sweep(const RunConfig& base, const InitialData& data, const Vec& gammas,
                        const SweepOptions& opt);

/// sweep_report.json plus tables/*.csv; every table row carries config_hash.
void write_sweep_report(const SweepReport& r, const std::filesystem::path& dir,
                        const std::string& config_hash);

}  // namespace beamfsi
