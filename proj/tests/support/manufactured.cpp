#include "support/manufactured.hpp"

#include "beamfsi/fluid_ops.hpp"

namespace beamfsi::support {

namespace {

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;

/// Seeds a three-level dual with the directions of the requested derivative.
D3 seed(double v, const bool dir[3]) {
  D3 r;
  r.v.v.v = v;
  if (dir[0]) r.d.v.v = 1.0;
  if (dir[1]) r.v.d.v = 1.0;
  if (dir[2]) r.v.v.d = 1.0;
  return r;
}

}  // namespace

double ChannelMMS::dpsi(int a, int b, double x, double y) const {
  require(a >= 0 && b >= 0 && a + b <= 3, "dpsi: order must be at most 3");
  bool is_x[3] = {false, false, false}, is_y[3] = {false, false, false};
  for (int l = 0; l < a + b; ++l) (l < a ? is_x : is_y)[l] = true;
  const D3 r = psi(seed(x, is_x), seed(y, is_y));
  const int n = a + b;
  if (n == 0) return r.v.v.v;
  if (n == 1) return r.d.v.v + r.v.d.v + r.v.v.d;
  if (n == 2) {
    // exactly two of the three levels are seeded, starting at level 0
    return r.d.d.v;
  }
  return r.d.d.d;
}

double ChannelMMS::pressure(double x, double y) const {
  return p_amp * std::cos(2.0 * std::numbers::pi * x / L) * (y - 0.5);
}

std::array<double, 2> ChannelMMS::force(double x, double y, double rho, double mu) const {
  const double k = 2.0 * std::numbers::pi / L;
  const double u = u1(x, y), v = u2(x, y);
  const double u_x = -dpsi(1, 1, x, y), u_y = -dpsi(0, 2, x, y);
  const double v_x = dpsi(2, 0, x, y), v_y = dpsi(1, 1, x, y);
  const double lap_u = -(dpsi(2, 1, x, y) + dpsi(0, 3, x, y));
  const double lap_v = dpsi(3, 0, x, y) + dpsi(1, 2, x, y);
  const double p_x = -p_amp * k * std::sin(k * x) * (y - 0.5);
  const double p_y = p_amp * std::cos(k * x);
  return {rho * (u * u_x + v * u_y) - mu * lap_u + p_x, rho * (u * v_x + v * v_y) - mu * lap_v + p_y};
}

Vec ChannelMMS::node_heights(int nx) const {
  Vec h(nx);
  for (int i = 0; i < nx; ++i) h[i] = height(i * L / nx);
  return h;
}

FluidState ChannelMMS::sample(const FluidGrid& g) const {
  const fluid::Metric m = fluid::Metric::from(node_heights(g.nx), g.L);
  FluidState s = FluidState::rest(g);
  const double dx = g.dx();
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.nz; ++j) s.u[g.i1(i, j)] = u1((i + 0.5) * dx, m.hf[i] * g.zc(j));
    for (int k = 1; k < g.nz; ++k) s.u[g.i2(i, k)] = u2(i * dx, m.h[i] * g.z(k));
  }
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nz; ++j) s.p[g.ip(i, j)] = pressure(i * dx, m.h[i] * g.zc(j));
  return s;
}

Vec ChannelMMS::force_samples(const FluidGrid& g, double rho, double mu) const {
  const fluid::Metric m = fluid::Metric::from(node_heights(g.nx), g.L);
  Vec f(g.nu(), 0.0);
  const double dx = g.dx();
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.nz; ++j) f[g.i1(i, j)] = force((i + 0.5) * dx, m.hf[i] * g.zc(j), rho, mu)[0];
    for (int k = 0; k <= g.nz; ++k) f[g.i2(i, k)] = force(i * dx, m.h[i] * g.z(k), rho, mu)[1];
  }
  return f;
}

FluidState ChannelMMS::solenoidal(const FluidGrid& g) const {
  const fluid::Metric m = fluid::Metric::from(node_heights(g.nx), g.L);
  Vec psi(static_cast<size_t>(g.nx) * (g.nz + 1));
  for (int f = 0; f < g.nx; ++f)
    for (int k = 0; k <= g.nz; ++k)
      psi[f * (g.nz + 1) + k] = this->psi((f + 0.5) * g.dx(), m.hf[f] * g.z(k));
  // the discrete top is the face average, where psi is only O(dx^2) small
  for (int f = 0; f < g.nx; ++f) psi[f * (g.nz + 1) + g.nz] = 0.0;
  return state_from_corner_stream(g, m.h, psi);
}

double velocity_l2(const FluidGrid& g, const Vec& h, const Vec& u) {
  const Vec V = fluid::volumes(g, fluid::Metric::from(h, g.L));
  double acc = 0.0;
  for (int r = 0; r < g.nu(); ++r) acc += V[r] * u[r] * u[r];
  return std::sqrt(acc);
}

MmsResult mms_steady_error(const ChannelMMS& m, int nx, int nz, const Params& p) {
  FluidGrid g{nx, nz, m.L};
  const Vec h = m.node_heights(nx);
  const FluidState exact = m.sample(g);
  const Vec f = m.force_samples(g, p.rho_f, p.mu);
  const FluidStepResult r = fluid_step(exact, h, h, Vec(nx, 0.0), 1e10, p, &f);
  Vec e(g.nu());
  for (int k = 0; k < g.nu(); ++k) e[k] = r.state.u[k] - exact.u[k];
  return {velocity_l2(g, h, e), velocity_l2(g, h, exact.u)};
}

}  // namespace beamfsi::support
