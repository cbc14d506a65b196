/// @file model.hpp
/// Physical parameters and the state of the coupled fluid / beam system.
///
/// The fluid lives on the reference rectangle (0,L) x (0,1) mapped to the
/// channel by y = h(x) z.  MAC layout in (x, z):
///   u1  faces x_{i+1/2}, half levels z_{j+1/2}    index i*nz + j
///   u2  nodes x_i, levels z_k, k = 0..nz          index i*(nz+1) + k
///   p   cells (x_i, z_{j+1/2})                    index i*nz + j
/// Velocities are physical (Cartesian) components.  u2 at k = 0 is the
/// no-slip wall, u2 at k = nz is the beam velocity.
#pragma once

#include <optional>

#include "beamfsi/common.hpp"

namespace beamfsi {

struct Params {
  double rho_f = 1.0;
  double rho_s = 1.0;
  double mu = 0.05;
  double alpha = 1e-3;
  double beta = 0.02;
  double gamma = 0.05;
  double L = 1.0;

  void validate() const;
};

struct FluidGrid {
  int nx = 0;
  int nz = 0;
  double L = 1.0;

  double dx() const { return L / nx; }
  double dz() const { return 1.0 / nz; }
  int n1() const { return nx * nz; }
  int n2() const { return nx * (nz + 1); }
  int nu() const { return n1() + n2(); }
  int np() const { return nx * nz; }
  int i1(int i, int j) const { return wrap(i, nx) * nz + j; }
  int i2(int i, int k) const { return n1() + wrap(i, nx) * (nz + 1) + k; }
  int ip(int i, int j) const { return wrap(i, nx) * nz + j; }
  double z(int k) const { return k * dz(); }
  double zc(int j) const { return (j + 0.5) * dz(); }
  bool operator==(const FluidGrid& o) const { return nx == o.nx && nz == o.nz && L == o.L; }
};

struct FluidState {
  FluidGrid grid;
  Vec u;  // [u1 | u2], length nu
  Vec p;  // mean-free, length np

  static FluidState rest(const FluidGrid& g);
  double u1(int i, int j) const { return u[grid.i1(i, j)]; }
  double u2(int i, int k) const { return u[grid.i2(i, k)]; }
  Vec top_velocity() const;
};

struct BeamState {
  Vec eta;
  Vec eta_dot;

  Vec height() const;
};

struct SimState {
  FluidState fluid;
  BeamState beam;
  double t = 0.0;
  long step = 0;

  Vec height() const { return beam.height(); }
};

enum class ContactPhase { Halted, Flagged };

struct ContactEvent {
  double time = 0.0;
  int node = 0;
  double x = 0.0;
  double min_height = 0.0;
  ContactPhase phase = ContactPhase::Halted;
};

}  // namespace beamfsi
