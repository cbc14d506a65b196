#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "assembly.hpp"
#include "beamfsi/spectral.hpp"

namespace beamfsi {

namespace {

double norm_inf(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Vec heights_from(const Vec& eta, const Vec& v, double dt) {
  Vec h(eta.size());
  for (size_t i = 0; i < eta.size(); ++i) h[i] = 1.0 + eta[i] + dt * v[i];
  return h;
}

void finish_report(StepOutcome& out, const SimState& s, double dt, const Params& p) {
  const Vec h = out.state.height();
  out.report.div_max = max_divergence(out.state.fluid, h);
  out.report.mean_eta_dot = spectral::mean(out.state.beam.eta_dot);
  out.report.viscous_increment = dt * viscous_dissipation_rate(out.state.fluid, h, p);
  out.report.damping_increment = dt * damping_rate(out.state.beam.eta_dot, p);
  double cfl = 0.0;
  const FluidGrid& g = s.fluid.grid;
  const double hmin = *std::min_element(h.begin(), h.end());
  for (int r = 0; r < g.nu(); ++r) {
    const double len = r < g.n1() ? g.dx() : hmin * g.dz();
    cfl = std::max(cfl, std::abs(out.state.fluid.u[r]) * dt / len);
  }
  out.report.cfl = cfl;
}

StepOutcome monolithic_step(const SimState& s, double dt, const Params& p,
                            const CouplingConfig& c, const Vec* force) {
  const FluidGrid& g = s.fluid.grid;
  const int n = g.nx, nu = g.nu(), np = g.np();
  const Vec h_old = s.height();

  const Vec c1 = spectral::circulant_column(n, p.L, [](double k) { return k * k; });
  const Vec c2 = spectral::circulant_column(n, p.L, [](double k) { return k * k * k * k; });
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int d = wrap(i - j, n);
      B(i, j) = (i == j ? p.rho_s / dt : 0.0) + p.gamma * c1[d] +
                dt * (p.beta * c1[d] + p.alpha * c2[d]);
    }
  Vec beam_rhs(n);
  for (int i = 0; i < n; ++i) {
    double acc = p.rho_s / dt * s.beam.eta_dot[i];
    for (int j = 0; j < n; ++j) {
      const int d = wrap(i - j, n);
      acc -= (p.beta * c1[d] + p.alpha * c2[d]) * s.beam.eta[j];
    }
    beam_rhs[i] = acc;
  }

  auto build = [&](const Vec& v, fluid::SpMat& A, Eigen::VectorXd& b) {
    const Vec h = heights_from(s.beam.eta, v, dt);
    if (*std::min_element(h.begin(), h.end()) <= 0.0) {
      throw NumericalError("coupled_step: degenerate channel height");
    }
    const detail::Assembly a = detail::assemble(g, h_old, h, s.fluid.u, dt, p, force);
    A = detail::saddle_matrix(a, detail::TopRows::Beam, &B, false);
    b = detail::saddle_rhs(a, detail::TopRows::Beam, beam_rhs, false);
  };

  auto top_of = [&](const Eigen::VectorXd& x) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = x[g.i2(i, g.nz)];
    return v;
  };

  fluid::SpMat A0, A;
  Eigen::VectorXd b0, b;
  build(s.beam.eta_dot, A0, b0);
  Eigen::SparseLU<fluid::SpMat> lu;
  lu.compute(A0);
  if (lu.info() != Eigen::Success) throw NumericalError("coupled_step: factorization failed");
  Eigen::VectorXd x = lu.solve(b0);

  StepOutcome out;
  double prev = 0.0;
  bool converged = false;
  for (int it = 1; it <= c.max_iterations; ++it) {
    build(top_of(x), A, b);
    const Eigen::VectorXd r = b - A * x;
    const double scale = std::max({b.lpNorm<Eigen::Infinity>(),
                                   (A * x).lpNorm<Eigen::Infinity>(), 1e-300});
    const double rel = r.lpNorm<Eigen::Infinity>() / scale;
    out.report.residual_history.push_back(rel);
    out.report.iterations = it;
    if (!std::isfinite(rel)) break;
    if (rel <= 1e-14 || (it > 3 && rel > 0.5 * prev && rel <= c.tolerance)) {
      converged = true;
      break;
    }
    prev = rel;
    x += lu.solve(r);
  }
  if (!converged || !x.allFinite()) {
    throw NumericalError("coupled_step: geometry fixed point did not converge, last residual " +
                         std::to_string(out.report.residual_history.empty()
                                            ? NAN
                                            : out.report.residual_history.back()));
  }

  SimState& ns = out.state;
  ns.fluid.grid = g;
  ns.fluid.u.assign(x.data(), x.data() + nu);
  ns.fluid.p.assign(x.data() + nu, x.data() + nu + np);
  const double pm = spectral::mean(ns.fluid.p);
  for (double& v : ns.fluid.p) v -= pm;
  ns.beam.eta_dot = top_of(x);
  ns.beam.eta.resize(n);
  for (int i = 0; i < n; ++i) ns.beam.eta[i] = s.beam.eta[i] + dt * ns.beam.eta_dot[i];
  ns.t = s.t + dt;
  ns.step = s.step + 1;

  const detail::Assembly a = detail::assemble(g, h_old, ns.height(), s.fluid.u, dt, p, force);
  const Traction tr = traction_from_residual(
      detail::top_rows(g, detail::momentum_residual(a, ns.fluid.u, ns.fluid.p)), g.dx());
  out.report.gauge = tr.gauge;
  out.report.trace_mismatch = 0.0;
  finish_report(out, s, dt, p);
  return out;
}

StepOutcome partitioned_step(const SimState& s, double dt, const Params& p,
                             const CouplingConfig& c, const Vec* force) {
  const FluidGrid& g = s.fluid.grid;
  const int n = g.nx;
  const Vec h_old = s.height();
  Vec v = s.beam.eta_dot;
  Vec r_prev;
  double omega = c.omega0;
  StepOutcome out;
  for (int it = 1; it <= c.max_iterations; ++it) {
    const Vec h = heights_from(s.beam.eta, v, dt);
    if (*std::min_element(h.begin(), h.end()) <= 0.0) {
      throw NumericalError("coupled_step: degenerate channel height");
    }
    FluidStepResult fr = fluid_step(s.fluid, h_old, h, v, dt, p, force);
    const Traction tr = traction_from_residual(fr.top_residual, g.dx());
    const BeamState bs = beam_step(s.beam, tr.phi, dt, p, 1.0);
    Vec r(n);
    for (int i = 0; i < n; ++i) r[i] = bs.eta_dot[i] - v[i];
    const double rel = norm_inf(r) / std::max(norm_inf(bs.eta_dot), 1e-14);
    out.report.residual_history.push_back(rel);
    out.report.iterations = it;
    if (rel <= c.tolerance || norm_inf(r) <= 1e-15) {
      SimState& ns = out.state;
      ns.fluid = std::move(fr.state);
      ns.beam = bs;
      ns.t = s.t + dt;
      ns.step = s.step + 1;
      out.report.gauge = tr.gauge;
      out.report.trace_mismatch = norm_inf(r);
      finish_report(out, s, dt, p);
      return out;
    }
    if (!r_prev.empty()) {
      double num = 0.0, den = 0.0;
      for (int i = 0; i < n; ++i) {
        const double dr = r[i] - r_prev[i];
        num += r_prev[i] * dr;
        den += dr * dr;
      }
      if (den > 0.0) omega = -omega * num / den;
    }
    for (int i = 0; i < n; ++i) v[i] += omega * r[i];
    r_prev = std::move(r);
  }
  throw NumericalError("coupled_step: partitioned iteration did not converge, last residual " +
                       std::to_string(out.report.residual_history.back()));
}

}  // namespace

StepOutcome coupled_step(const SimState& s, double dt, const Params& p, const CouplingConfig& c,
                         const Vec* force) {
  require(dt > 0.0, "coupled_step: dt must be positive");
  require(static_cast<int>(s.beam.eta.size()) == s.fluid.grid.nx,
          "coupled_step: beam and fluid grids differ");
  return c.mode == CouplingMode::Monolithic ? monolithic_step(s, dt, p, c, force)
                                            : partitioned_step(s, dt, p, c, force);
}

std::optional<ContactEvent> detect_contact(const SimState& s, double eps_c, ContactPhase phase) {
  const Vec h = s.height();
  const auto it = std::min_element(h.begin(), h.end());
  if (*it > eps_c) return std::nullopt;
  ContactEvent e;
  e.time = s.t;
  e.node = static_cast<int>(it - h.begin());
  e.x = e.node * s.fluid.grid.dx();
  e.min_height = *it;
  e.phase = phase;
  return e;
}

}  // namespace beamfsi
