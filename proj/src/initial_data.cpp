#include <algorithm>
#include <cmath>

#include "beamfsi/fluid_ops.hpp"
#include "beamfsi/kernels.hpp"
#include "beamfsi/solver.hpp"
#include "beamfsi/spectral.hpp"

namespace beamfsi {

InitialDataReport check_initial_data(const InitialData& d, double tolerance) {
  InitialDataReport rep;
  const FluidGrid& g = d.u0.grid;
  const int n = static_cast<int>(d.eta0.size());
  if (static_cast<int>(d.eta1.size()) != n || g.nx != n ||
      static_cast<int>(d.u0.u.size()) != g.nu()) {
    rep.problems.push_back("initial arrays are on different grids");
    return rep;
  }
  Vec h0(n);
  for (int i = 0; i < n; ++i) h0[i] = 1.0 + d.eta0[i];
  rep.min_height = *std::min_element(h0.begin(), h0.end());
  if (!(rep.min_height > 0.0)) {
    rep.problems.push_back("min(1+eta0) = " + std::to_string(rep.min_height) + " is not positive");
  }
  const double scale1 = std::max(1.0, max_abs(d.eta1));
  rep.mean_eta1 = spectral::mean(d.eta1);
  if (std::abs(rep.mean_eta1) > tolerance * scale1) {
    rep.problems.push_back("eta1 is not mean-free: mean " + std::to_string(rep.mean_eta1));
  }
  double tm = 0.0;
  for (int i = 0; i < n; ++i) tm = std::max(tm, std::abs(d.u0.u2(i, g.nz) - d.eta1[i]));
  for (int i = 0; i < n; ++i) tm = std::max(tm, std::abs(d.u0.u2(i, 0)));
  rep.trace_mismatch = tm;
  if (tm > tolerance * scale1) {
    rep.problems.push_back("u0 boundary values do not match (0, eta1) on top and 0 on the floor: "
                           "max mismatch " + std::to_string(tm));
  }
  if (rep.min_height > 0.0) {
    rep.max_divergence = max_divergence(d.u0, h0);
    const double su = std::max(1.0, max_abs(d.u0.u)) / std::min(g.dx(), g.dz() * rep.min_height);
    if (rep.max_divergence > tolerance * su) {
      rep.problems.push_back("u0 is not divergence-free: max cell divergence " +
                             std::to_string(rep.max_divergence));
    }
  }
  return rep;
}

void validate_initial_data(const InitialData& d, double tolerance) {
  const InitialDataReport rep = check_initial_data(d, tolerance);
  if (rep.ok()) return;
  std::string msg = "invalid initial data:";
  for (const auto& s : rep.problems) msg += "\n  " + s;
  throw ConfigError(msg);
}

Vec corner_stream(const FluidState& f, const Vec& h) {
  const FluidGrid& g = f.grid;
  const fluid::Metric m = fluid::Metric::from(h, g.L);
  Vec psi(static_cast<size_t>(g.nx) * (g.nz + 1), 0.0);
  for (int c = 0; c < g.nx; ++c)
    for (int k = 0; k < g.nz; ++k)
      psi[c * (g.nz + 1) + k + 1] = psi[c * (g.nz + 1) + k] - g.dz() * m.hf[c] * f.u1(c, k);
  return psi;
}

FluidState state_from_corner_stream(const FluidGrid& g, const Vec& h, const Vec& psi) {
  const fluid::Metric m = fluid::Metric::from(h, g.L);
  const int s = g.nz + 1;
  FluidState f = FluidState::rest(g);
  for (int c = 0; c < g.nx; ++c)
    for (int j = 0; j < g.nz; ++j)
      f.u[g.i1(c, j)] = -(psi[c * s + j + 1] - psi[c * s + j]) / (g.dz() * m.hf[c]);
  for (int i = 0; i < g.nx; ++i)
    for (int k = 0; k <= g.nz; ++k) {
      double v = (psi[i * s + k] - psi[wrap(i - 1, g.nx) * s + k]) / g.dx();
      if (k > 0 && k < g.nz) {
        const double ub = 0.25 * (f.u1(i - 1, k - 1) + f.u1(i, k - 1) + f.u1(i - 1, k) +
                                  f.u1(i, k));
        v += g.z(k) * m.dh[i] * ub;
      }
      f.u[g.i2(i, k)] = v;
    }
  return f;
}

FluidState lift_state(const FluidGrid& g, const Vec& eta1, const Vec& h, double lambda) {
  require(lambda > 0.0, "lift_state: lambda must be positive");
  const Vec b = face_antiderivative(eta1, g.L);
  const Vec H = face_heights(h);
  const int s = g.nz + 1;
  Vec psi(static_cast<size_t>(g.nx) * s, 0.0);
  for (int c = 0; c < g.nx; ++c) {
    for (int k = 1; k < g.nz; ++k) psi[c * s + k] = b[c] * smooth_step(H[c] * g.z(k) / lambda);
    psi[c * s + g.nz] = b[c];
  }
  return state_from_corner_stream(g, h, psi);
}

namespace {

/// Column value of a corner stream function at physical height y.
double column_sample(const Vec& psi, int c, int nz, double H, double y) {
  if (y <= 0.0) return 0.0;
  if (y >= H) return psi[c * (nz + 1) + nz];
  return kernels::cubic_at(psi.data() + c * (nz + 1), 1, nz + 1, {0.0, 1.0 / nz}, y / H);
}

}  // namespace

InitialData regularize_initial_data(const InitialData& d, double gamma, const Params& p,
                                    RegularizeReport* report) {
  validate_initial_data(d);
  require(gamma > 0.0, "regularize_initial_data: gamma must be positive");
  const FluidGrid& g = d.u0.grid;
  const int n = g.nx, s = g.nz + 1;
  Vec h0(n);
  for (int i = 0; i < n; ++i) h0[i] = 1.0 + d.eta0[i];
  const double hmin = *std::min_element(h0.begin(), h0.end());
  const double lambda = 0.5 * hmin;
  const double C = spectral::h2_norm(d.eta0, p.L);
  if (C * gamma >= lambda) {
    throw ConfigError("regularize_initial_data: gamma " + std::to_string(gamma) +
                      " too large for min(1+eta0) = " + std::to_string(hmin) +
                      " (needs C gamma < min height / 2, C = " + std::to_string(C) + ")");
  }
  const double sigma = 1.0 + 2.0 * C * gamma / lambda;

  InitialData out;
  out.eta0 = mollify_periodic(d.eta0, p.L, gamma);
  Vec hg(n);
  for (int i = 0; i < n; ++i) hg[i] = 1.0 + out.eta0[i];

  const Vec psi0 = corner_stream(d.u0, h0);
  const Vec H0 = face_heights(h0);
  const Vec Hg = face_heights(hg);
  Vec b0(n);
  for (int c = 0; c < n; ++c) b0[c] = psi0[c * s + g.nz];
  const Vec bg = mollify_periodic(b0, p.L, gamma);
  const Vec w = mollifier_weights(n, p.L, gamma);
  const int reach = static_cast<int>(w.size() / 2);

  auto remainder = [&](int c, double y) {
    const double ys = sigma * y;
    return column_sample(psi0, c, g.nz, H0[c], ys) - b0[c] * smooth_step(ys / lambda);
  };

  Vec psi(static_cast<size_t>(n) * s, 0.0);
  for (int c = 0; c < n; ++c) {
    for (int k = 1; k < g.nz; ++k) {
      const double y = Hg[c] * g.z(k);
      const double r0 = remainder(c, y);
      double acc = 0.0;
      for (int m = -reach; m <= reach; ++m) acc += w[m + reach] * (remainder(wrap(c + m, n), y) - r0);
      psi[c * s + k] = r0 + acc + bg[c] * smooth_step(y / lambda);
    }
    psi[c * s + g.nz] = bg[c];
  }
  out.u0 = state_from_corner_stream(g, hg, psi);
  out.eta1 = out.u0.top_velocity();

  if (report) {
    report->lambda = lambda;
    report->sigma = sigma;
    report->h2_constant = C;
    report->min_height = *std::min_element(hg.begin(), hg.end());
  }
  return out;
}

ContainerGrid container_for(const FluidGrid& g, double M, int cells_per_unit) {
  return ContainerGrid::make(g.nx, g.L, M, cells_per_unit);
}

ExtendedField extend_state(const FluidState& f, const BeamState& b, const ContainerGrid& cg) {
  const FluidGrid& g = f.grid;
  require(cg.nx == g.nx && std::abs(cg.L - g.L) < 1e-14 * g.L,
          "extend_state: container x-grid differs from the solver grid");
  const Vec h = b.height();
  if (*std::max_element(h.begin(), h.end()) > cg.top()) {
    throw ConfigError("extend_state: beam height exceeds the container");
  }
  const Vec psi = corner_stream(f, h);
  const Vec H = face_heights(h);
  StreamFunction sf;
  sf.grid = cg;
  sf.h = h;
  sf.psi.assign(static_cast<size_t>(cg.ny + 1) * cg.nx, 0.0);
  for (int j = 0; j <= cg.ny; ++j)
    for (int c = 0; c < cg.nx; ++c) sf.at(c, j) = column_sample(psi, c, g.nz, H[c], cg.y(j));
  sf.b.assign(sf.psi.end() - cg.nx, sf.psi.end());
  return curl(sf);
}

}  // namespace beamfsi
