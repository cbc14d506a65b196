/// @file fluid_ops.hpp
/// Sparse operators of the mapped-grid fluid discretization.
#pragma once

#include <Eigen/Sparse>

#include "beamfsi/model.hpp"

namespace beamfsi::fluid {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Node heights h_i, face heights, node slopes (central) and face slopes.
struct Metric {
  Vec h;
  Vec hf;
  Vec dh;
  Vec dhf;

  static Metric from(const Vec& h, double L);
};

/// Lumped velocity volumes (halved on the u2 wall rows), length nu.
Vec volumes(const FluidGrid& g, const Metric& m);

/// Cell integrals of h * div u (np x nu).  Summed over all cells this is
/// dx times the sum of the top u2 row.
SpMat divergence(const FluidGrid& g, const Metric& m);

/// Physical velocity gradient sampled at cell centres and corners, with
/// quadrature weights, so that G^T W G is the discrete int |grad u|^2.
struct Gradient {
  SpMat G;
  Vec w;
  int rows_per_block = 0;  // blocks: du1/dx, du1/dy, du2/dx, du2/dy
  int corner_rows = 0;
};
Gradient gradient(const FluidGrid& g, const Metric& m);
SpMat viscous(const Gradient& gr);

/// Centred advection (a . grad) on interior rows, a = adv - (0, z hdot).
SpMat advection(const FluidGrid& g, const Metric& m, const Vec& adv, const Vec& hdot);

/// Momentum operator S and right-hand side b of one implicit step,
/// before boundary rows are replaced:
///   rho_f [V0 (u - u0)/dt + (V1 - V0) u / (2 dt) + K_s u] + mu A u = V1 f.
struct Momentum {
  SpMat S;
  Vec b;
};
Momentum momentum(const FluidGrid& g, const Metric& m0, const Metric& m1, const Vec& u0,
                  const Vec& hdot, double dt, double rho_f, double mu, const Vec* force);

}  // namespace beamfsi::fluid
