#include "beamfsi/solver.hpp"

namespace beamfsi {

EnergyTerms energy_terms(const SimState& s, const Params& p) {
  EnergyTerms e;
  const Vec h = s.height();
  e.fluid_kinetic = fluid_kinetic_energy(s.fluid, h, p);
  const double dx = s.fluid.grid.dx();
  double v2 = 0.0;
  for (double v : s.beam.eta_dot) v2 += v * v;
  e.beam_kinetic = 0.5 * p.rho_s * v2 * dx;
  e.elastic = 0.5 * beam_stiffness_norm_sq(s.beam.eta, p);
  return e;
}

}  // namespace beamfsi
