#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "assembly.hpp"
#include "beamfsi/spectral.hpp"

namespace beamfsi {

void Params::validate() const {
  if (!(rho_f > 0.0)) throw ConfigError("rho_f must be positive");
  if (!(rho_s > 0.0)) throw ConfigError("rho_s must be positive");
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(beta >= 0.0)) throw ConfigError("beta must be nonnegative");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
  if (!(L > 0.0)) throw ConfigError("L must be positive");
}

FluidState FluidState::rest(const FluidGrid& g) {
  FluidState s;
  s.grid = g;
  s.u.assign(g.nu(), 0.0);
  s.p.assign(g.np(), 0.0);
  return s;
}

Vec FluidState::top_velocity() const {
  Vec v(grid.nx);
  for (int i = 0; i < grid.nx; ++i) v[i] = u2(i, grid.nz);
  return v;
}

namespace detail {

Assembly assemble(const FluidGrid& g, const Vec& h_old, const Vec& h_new, const Vec& u0,
                  double dt, const Params& p, const Vec* force) {
  Assembly a;
  a.g = g;
  const fluid::Metric m0 = fluid::Metric::from(h_old, g.L);
  a.m1 = fluid::Metric::from(h_new, g.L);
  Vec hdot(g.nx);
  for (int i = 0; i < g.nx; ++i) hdot[i] = (h_new[i] - h_old[i]) / dt;
  a.mo = fluid::momentum(g, m0, a.m1, u0, hdot, dt, p.rho_f, p.mu, force);
  a.D = fluid::divergence(g, a.m1);
  return a;
}

namespace {

enum class RowKind { Interior, Bottom, Top };

RowKind kind(const FluidGrid& g, int r) {
  if (r < g.n1()) return RowKind::Interior;
  const int k = (r - g.n1()) % (g.nz + 1);
  if (k == 0) return RowKind::Bottom;
  if (k == g.nz) return RowKind::Top;
  return RowKind::Interior;
}

}  // namespace

fluid::SpMat saddle_matrix(const Assembly& a, TopRows top, const Eigen::MatrixXd* beam_block,
                           bool gauge_row) {
  const FluidGrid& g = a.g;
  const int nu = g.nu(), np = g.np();
  const int N = nu + np + (gauge_row ? 1 : 0);
  auto free_row = [&](int r) {
    const RowKind k = kind(g, r);
    return k == RowKind::Interior || (k == RowKind::Top && top == TopRows::Beam);
  };
  fluid::Triplets t;
  t.reserve(a.mo.S.nonZeros() + 2 * a.D.nonZeros() + nu + 2 * np +
            (beam_block ? g.nx * g.nx : 0));
  for (int c = 0; c < a.mo.S.outerSize(); ++c)
    for (fluid::SpMat::InnerIterator it(a.mo.S, c); it; ++it)
      if (free_row(static_cast<int>(it.row()))) t.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < a.D.outerSize(); ++c)
    for (fluid::SpMat::InnerIterator it(a.D, c); it; ++it) {
      const int q = static_cast<int>(it.row());
      const int col = static_cast<int>(it.col());
      t.emplace_back(nu + q, col, it.value());
      if (free_row(col)) t.emplace_back(col, nu + q, -it.value());
    }
  for (int r = 0; r < nu; ++r)
    if (!free_row(r)) t.emplace_back(r, r, 1.0);
  if (top == TopRows::Beam && beam_block) {
    const double dx = g.dx();
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.nx; ++j)
        t.emplace_back(g.i2(i, g.nz), g.i2(j, g.nz), dx * (*beam_block)(i, j));
  }
  if (gauge_row) {
    for (int q = 0; q < np; ++q) {
      t.emplace_back(nu + q, N - 1, 1.0);
      t.emplace_back(N - 1, nu + q, 1.0);
    }
  }
  fluid::SpMat A(N, N);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

Eigen::VectorXd saddle_rhs(const Assembly& a, TopRows top, const Vec& top_values,
                           bool gauge_row) {
  const FluidGrid& g = a.g;
  const int nu = g.nu(), np = g.np();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nu + np + (gauge_row ? 1 : 0));
  for (int r = 0; r < nu; ++r) {
    switch (kind(g, r)) {
      case RowKind::Interior: b[r] = a.mo.b[r]; break;
      case RowKind::Bottom: break;
      case RowKind::Top: {
        const int i = (r - g.n1()) / (g.nz + 1);
        b[r] = top == TopRows::Dirichlet ? top_values[i] : a.mo.b[r] + g.dx() * top_values[i];
        break;
      }
    }
  }
  return b;
}

Vec momentum_residual(const Assembly& a, const Vec& u, const Vec& p) {
  const int nu = a.g.nu();
  Eigen::Map<const Eigen::VectorXd> uu(u.data(), nu);
  Eigen::Map<const Eigen::VectorXd> pp(p.data(), a.g.np());
  Eigen::Map<const Eigen::VectorXd> bb(a.mo.b.data(), nu);
  Eigen::VectorXd r = a.mo.S * uu - bb - a.D.transpose() * pp;
  return Vec(r.data(), r.data() + nu);
}

Vec top_rows(const FluidGrid& g, const Vec& r) {
  Vec t(g.nx);
  for (int i = 0; i < g.nx; ++i) t[i] = r[g.i2(i, g.nz)];
  return t;
}

}  // namespace detail

namespace {

double cfl_number(const FluidState& f, const Vec& h, double dt) {
  const FluidGrid& g = f.grid;
  const double hmin = *std::min_element(h.begin(), h.end());
  double a = 0.0;
  for (int r = 0; r < g.n1(); ++r) a = std::max(a, std::abs(f.u[r]) * dt / g.dx());
  for (int r = g.n1(); r < g.nu(); ++r) a = std::max(a, std::abs(f.u[r]) * dt / (hmin * g.dz()));
  return a;
}

}  // namespace

FluidStepResult fluid_step(const FluidState& prev, const Vec& h_old, const Vec& h_new,
                           const Vec& top_velocity, double dt, const Params& p,
                           const Vec* force) {
  const FluidGrid& g = prev.grid;
  require(static_cast<int>(h_old.size()) == g.nx && static_cast<int>(h_new.size()) == g.nx &&
              static_cast<int>(top_velocity.size()) == g.nx,
          "fluid_step: array sizes differ from the grid");
  require(dt > 0.0, "fluid_step: dt must be positive");
  if (*std::min_element(h_new.begin(), h_new.end()) <= 0.0 ||
      *std::min_element(h_old.begin(), h_old.end()) <= 0.0) {
    throw NumericalError("fluid_step: degenerate channel height");
  }
  const detail::Assembly a = detail::assemble(g, h_old, h_new, prev.u, dt, p, force);
  const fluid::SpMat A = detail::saddle_matrix(a, detail::TopRows::Dirichlet, nullptr, true);
  const Eigen::VectorXd b = detail::saddle_rhs(a, detail::TopRows::Dirichlet, top_velocity, true);
  Eigen::SparseLU<fluid::SpMat> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw NumericalError("fluid_step: factorization failed");
  Eigen::VectorXd x = lu.solve(b);
  x += lu.solve(b - A * x);
  if (!x.allFinite()) throw NumericalError("fluid_step: linear solve produced non-finite values");

  FluidStepResult res;
  res.state.grid = g;
  res.state.u.assign(x.data(), x.data() + g.nu());
  res.state.p.assign(x.data() + g.nu(), x.data() + g.nu() + g.np());
  const double pm = spectral::mean(res.state.p);
  for (double& v : res.state.p) v -= pm;
  res.top_residual = detail::top_rows(g, detail::momentum_residual(a, res.state.u, res.state.p));
  res.div_max = max_divergence(res.state, h_new);
  res.cfl = cfl_number(res.state, h_new, dt);
  return res;
}

Traction traction_from_residual(const Vec& top_residual, double dx) {
  Traction t;
  t.phi.resize(top_residual.size());
  for (size_t i = 0; i < top_residual.size(); ++i) t.phi[i] = -top_residual[i] / dx;
  t.gauge = spectral::mean(t.phi);
  for (double& v : t.phi) v -= t.gauge;
  return t;
}

Traction traction_on_beam(const FluidState& fluid, const FluidState& prev, const Vec& h_old,
                          const Vec& h_new, double dt, const Params& p, const Vec* force) {
  const detail::Assembly a = detail::assemble(fluid.grid, h_old, h_new, prev.u, dt, p, force);
  return traction_from_residual(
      detail::top_rows(fluid.grid, detail::momentum_residual(a, fluid.u, fluid.p)),
      fluid.grid.dx());
}

double max_divergence(const FluidState& f, const Vec& h) {
  const FluidGrid& g = f.grid;
  const fluid::Metric m = fluid::Metric::from(h, g.L);
  const fluid::SpMat D = fluid::divergence(g, m);
  Eigen::Map<const Eigen::VectorXd> u(f.u.data(), g.nu());
  const Eigen::VectorXd d = D * u;
  double out = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.nz; ++j)
      out = std::max(out, std::abs(d[g.ip(i, j)]) / (m.h[i] * g.dx() * g.dz()));
  return out;
}

double fluid_kinetic_energy(const FluidState& f, const Vec& h, const Params& p) {
  const Vec V = fluid::volumes(f.grid, fluid::Metric::from(h, f.grid.L));
  double e = 0.0;
  for (size_t r = 0; r < V.size(); ++r) e += V[r] * f.u[r] * f.u[r];
  return 0.5 * p.rho_f * e;
}

double viscous_dissipation_rate(const FluidState& f, const Vec& h, const Params& p) {
  const fluid::Gradient gr = fluid::gradient(f.grid, fluid::Metric::from(h, f.grid.L));
  Eigen::Map<const Eigen::VectorXd> u(f.u.data(), f.grid.nu());
  const Eigen::VectorXd gu = gr.G * u;
  double s = 0.0;
  for (long r = 0; r < gu.size(); ++r) s += gr.w[r] * gu[r] * gu[r];
  return p.mu * s;
}

}  // namespace beamfsi
