#include "beamfsi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "beamfsi/fluid_ops.hpp"
#include "beamfsi/kernels.hpp"

namespace beamfsi {

double EnergyLedger::max_abs_relative() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, std::abs(r.relative));
  return m;
}

double EnergyLedger::final_relative() const { return rows.empty() ? 0.0 : rows.back().relative; }

bool EnergyLedger::dissipative(double roundoff) const {
  const double tol = roundoff * std::max(initial, 1e-300);
  return std::all_of(rows.begin(), rows.end(), [tol](const LedgerRow& r) { return r.residual <= tol; });
}

namespace {

EnergyLedger close_ledger(EnergyLedger L) {
  for (auto& r : L.rows) {
    r.residual = r.energy.total() + r.viscous + r.damping - L.initial;
    r.relative = L.initial > 0.0 ? r.residual / L.initial : 0.0;
  }
  return L;
}

}  // namespace

EnergyLedger energy_ledger(const std::vector<StepRecord>& records) {
  EnergyLedger L;
  if (records.empty()) return L;
  L.initial = records.front().energy.total();
  double vis = 0.0, dam = 0.0;
  for (size_t k = 0; k < records.size(); ++k) {
    if (k > 0) {
      vis += records[k].viscous_increment;
      dam += records[k].damping_increment;
    }
    LedgerRow r;
    r.step = records[k].step;
    r.t = records[k].t;
    r.energy = records[k].energy;
    r.viscous = vis;
    r.damping = dam;
    L.rows.push_back(r);
  }
  return close_ledger(std::move(L));
}

EnergyLedger energy_ledger(const std::vector<SimState>& states, const Params& p) {
  EnergyLedger L;
  if (states.empty()) return L;
  double vis = 0.0, dam = 0.0;
  for (size_t k = 0; k < states.size(); ++k) {
    const SimState& s = states[k];
    if (k > 0) {
      const double dt = s.t - states[k - 1].t;
      vis += dt * viscous_dissipation_rate(s.fluid, s.height(), p);
      dam += dt * damping_rate(s.beam.eta_dot, p);
    }
    LedgerRow r;
    r.step = s.step;
    r.t = s.t;
    r.energy = energy_terms(s, p);
    r.viscous = vis;
    r.damping = dam;
    L.rows.push_back(r);
  }
  L.initial = L.rows.front().energy.total();
  return close_ledger(std::move(L));
}

KornReport korn_report(const FluidState& f, const Vec& h) {
  const FluidGrid& g = f.grid;
  const fluid::Gradient gr = fluid::gradient(g, fluid::Metric::from(h, g.L));
  Eigen::Map<const Eigen::VectorXd> u(f.u.data(), g.nu());
  const Eigen::VectorXd gu = gr.G * u;
  const int nc = gr.rows_per_block, nk = gr.corner_rows;
  KornReport k;
  double grad = 0.0, sym = 0.0;
  for (int r = 0; r < nc; ++r) {
    const double a = gu[r], d = gu[nc + 2 * nk + r];
    grad += gr.w[r] * a * a + gr.w[nc + 2 * nk + r] * d * d;
    sym += 4.0 * (gr.w[r] * a * a + gr.w[nc + 2 * nk + r] * d * d);
  }
  for (int r = 0; r < nk; ++r) {
    const double b = gu[nc + r], c = gu[nc + nk + r];
    grad += gr.w[nc + r] * b * b + gr.w[nc + nk + r] * c * c;
    sym += 2.0 * gr.w[nc + r] * (b + c) * (b + c);
  }
  k.symmetric = sym;
  k.gradient = 2.0 * grad;
  k.relative = k.gradient > 0.0 ? std::abs(k.symmetric - k.gradient) / k.gradient : 0.0;
  return k;
}

double korn_residual(const FluidState& f, const Vec& h) { return korn_report(f, h).relative; }

namespace {

struct CellSums {
  double l4 = 0.0;  // int |u|^4
  double l2 = 0.0;
  double grad = 0.0;
};

CellSums cell_sums(const ExtendedField& w) {
  const auto& g = w.grid;
  const double dx = g.dx(), dy = g.dy, a = dx * dy;
  const int nc = g.nx * g.ny;
  Vec mag(nc), wt(nc, a);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double u1 = 0.5 * (w.U1(wrap(i - 1, g.nx), j) + w.U1(i, j));
      const double u2 = 0.5 * (w.U2(i, j) + w.U2(i, j + 1));
      mag[j * g.nx + i] = std::sqrt(u1 * u1 + u2 * u2);
    }
  CellSums s;
  s.l4 = kernels::power_sum(mag, wt, 4);
  s.l2 = kernels::power_sum(mag, wt, 2);
  double gsum = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double gx = (w.U1(wrap(i + 1, g.nx), j) - w.U1(i, j)) / dx;
      gsum += gx * gx;
      if (j + 1 < g.ny) {
        const double gy = (w.U1(i, j + 1) - w.U1(i, j)) / dy;
        gsum += gy * gy;
      }
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double gx = (w.U2(wrap(i + 1, g.nx), j) - w.U2(i, j)) / dx;
      gsum += gx * gx;
      if (j + 1 <= g.ny) {
        const double gy = (w.U2(i, j + 1) - w.U2(i, j)) / dy;
        gsum += gy * gy;
      }
    }
  s.grad = gsum * a;
  return s;
}

Vec trapezoid_weights(const Vec& t) {
  const size_t n = t.size();
  if (n == 1) return {1.0};
  Vec w(n, 0.0);
  for (size_t k = 0; k + 1 < n; ++k) {
    const double h = t[k + 1] - t[k];
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace

double l4_norm(const ExtendedField& w) { return std::pow(cell_sums(w).l4, 0.25); }

L4Report l4_bound_check(const std::vector<ExtendedField>& fields, const Vec& times) {
  require(fields.size() == times.size(), "l4_bound_check: fields and times differ in length");
  L4Report r;
  if (fields.empty()) return r;
  const Vec w = trapezoid_weights(times);
  double l4 = 0.0, l2 = 0.0;
  for (size_t k = 0; k < fields.size(); ++k) {
    const CellSums s = cell_sums(fields[k]);
    l4 += w[k] * s.l4;
    l2 += w[k] * s.l2;
    r.per_time_l4.push_back(std::pow(s.l4, 0.25));
    const double den = std::sqrt(s.l2) * std::sqrt(s.l2 + s.grad);
    if (den > 0.0) r.max_ratio = std::max(r.max_ratio, std::sqrt(s.l4) / den);
  }
  r.l4 = std::pow(l4, 0.25);
  r.l2 = std::sqrt(l2);
  return r;
}

FluxReport component_flux_report(const BeamState& b, double L, double eps_c) {
  const int n = static_cast<int>(b.eta.size());
  const double dx = L / n;
  const Vec h = b.height();
  FluxReport rep;
  std::vector<char> wet(n);
  for (int i = 0; i < n; ++i) wet[i] = h[i] > eps_c;
  for (int i = 0; i < n; ++i) {
    rep.global_flux += b.eta_dot[i] * dx;
    if (!wet[i]) rep.contact_flux += b.eta_dot[i] * dx;
  }
  const int dry = static_cast<int>(std::find(wet.begin(), wet.end(), 0) - wet.begin());
  if (dry == n) {
    ComponentFlux c;
    c.first_node = 0;
    c.nodes = n;
    for (int i = 0; i < n; ++i) c.flux += b.eta_dot[i] * dx;
    rep.components.push_back(c);
    return rep;
  }
  // walk once around the circle starting just after a dry node
  int k = 1;
  while (k <= n) {
    const int i = wrap(dry + k, n);
    if (!wet[i]) {
      ++k;
      continue;
    }
    ComponentFlux c;
    c.first_node = i;
    while (k <= n && wet[wrap(dry + k, n)]) {
      c.flux += b.eta_dot[wrap(dry + k, n)] * dx;
      ++c.nodes;
      ++k;
    }
    rep.components.push_back(c);
  }
  return rep;
}

ProjectorStudy projector_error_study(const CouplePair& pair, const Profile& h,
                                     const std::vector<Profile>& family,
                                     const SobolevConfig& cfg) {
  cfg.validate();
  ProjectorStudy st;
  for (const Profile& hb : family) {
    if (hb.size() != h.size()) throw ConfigError("projector_error_study: grid mismatch");
    for (int i = 0; i < h.size(); ++i) {
      if (hb.h[i] > h.h[i]) {
        throw ConfigError("projector_error_study: family member lies above h at node " +
                          std::to_string(i));
      }
    }
    const CouplePair comp = projector_competitor(pair, h, hb, cfg);
    ProjectorRow row;
    row.gap = w1inf_distance(h, hb);
    row.error = xs_norm(difference(comp, pair), cfg);
    st.rows.push_back(row);
  }
  st.decreasing = !st.rows.empty();
  for (size_t k = 1; k < st.rows.size(); ++k)
    if (!(st.rows[k].error < st.rows[k - 1].error)) st.decreasing = false;
  return st;
}

ProjectorSetup lift_pair_setup(int nx, double L, int cells_per_unit, double amplitude, int j_first,
                               int j_last) {
  require(j_first >= 1 && j_last >= j_first, "lift_pair_setup: bad exponent range");
  ProjectorSetup st;
  const double k = 2.0 * std::numbers::pi / L;
  st.h = Profile::sample([&](double x) { return 1.0 + 0.3 * std::cos(k * x); }, nx, L);
  Vec d(nx);
  for (int i = 0; i < nx; ++i) d[i] = amplitude * std::sin(k * i * L / nx);
  const ContainerGrid g = ContainerGrid::make(nx, L, st.h.max(), cells_per_unit);
  st.pair.d = d;
  st.pair.w = extend(curl(lift_stream(d, 0.5 * st.h.min(), g)), d, st.h.h);
  for (int j = j_first; j <= j_last; ++j)
    st.family.push_back(positive_part_shift(st.h, std::ldexp(1.0, -j)));
  return st;
}

}  // namespace beamfsi
