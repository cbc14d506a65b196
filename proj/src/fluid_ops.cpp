#include "beamfsi/fluid_ops.hpp"

namespace beamfsi::fluid {

Metric Metric::from(const Vec& h, double L) {
  const int n = static_cast<int>(h.size());
  const double dx = L / n;
  Metric m;
  m.h = h;
  m.hf.resize(n);
  m.dh.resize(n);
  m.dhf.resize(n);
  for (int i = 0; i < n; ++i) {
    const double hp = h[wrap(i + 1, n)], hm = h[wrap(i - 1, n)];
    m.hf[i] = 0.5 * (h[i] + hp);
    m.dh[i] = (hp - hm) / (2.0 * dx);
    m.dhf[i] = (hp - h[i]) / dx;
  }
  return m;
}

Vec volumes(const FluidGrid& g, const Metric& m) {
  Vec V(g.nu());
  const double a = g.dx() * g.dz();
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.nz; ++j) V[g.i1(i, j)] = m.hf[i] * a;
    for (int k = 0; k <= g.nz; ++k) V[g.i2(i, k)] = m.h[i] * a * ((k == 0 || k == g.nz) ? 0.5 : 1.0);
  }
  return V;
}

SpMat divergence(const FluidGrid& g, const Metric& m) {
  const double dx = g.dx(), dz = g.dz();
  const int nz = g.nz;
  Triplets t;
  t.reserve(static_cast<size_t>(g.np()) * 12);
  auto add_flux = [&](int row, int i, int k, double c) {
    t.emplace_back(row, g.i2(i, k), c);
    if (k > 0 && k < nz) {
      const double a = -c * g.z(k) * m.dh[i] * 0.25;
      t.emplace_back(row, g.i1(i - 1, k - 1), a);
      t.emplace_back(row, g.i1(i, k - 1), a);
      t.emplace_back(row, g.i1(i - 1, k), a);
      t.emplace_back(row, g.i1(i, k), a);
    }
  };
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < nz; ++j) {
      const int row = g.ip(i, j);
      t.emplace_back(row, g.i1(i, j), dz * m.hf[i]);
      t.emplace_back(row, g.i1(i - 1, j), -dz * m.hf[wrap(i - 1, g.nx)]);
      add_flux(row, i, j + 1, dx);
      add_flux(row, i, j, -dx);
    }
  SpMat D(g.np(), g.nu());
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

Gradient gradient(const FluidGrid& g, const Metric& m) {
  const double dx = g.dx(), dz = g.dz();
  const int nx = g.nx, nz = g.nz;
  const int nc = nx * nz, nk = nx * (nz + 1);
  Gradient gr;
  gr.rows_per_block = nc;
  gr.corner_rows = nk;
  const int off_b = nc, off_c = nc + nk, off_d = nc + 2 * nk;
  const int rows = 2 * nc + 2 * nk;
  gr.w.assign(rows, 0.0);
  Triplets t;
  t.reserve(static_cast<size_t>(rows) * 10);

  // d u1 / dz at corner (face f, level k); one-sided over dz/2 at the walls
  auto add_cz = [&](int row, int f, int k, double c) {
    if (k == 0) {
      t.emplace_back(row, g.i1(f, 0), 2.0 * c / dz);
    } else if (k == nz) {
      t.emplace_back(row, g.i1(f, nz - 1), -2.0 * c / dz);
    } else {
      t.emplace_back(row, g.i1(f, k), c / dz);
      t.emplace_back(row, g.i1(f, k - 1), -c / dz);
    }
  };
  // d u2 / dz at centre (node i, half level j)
  auto add_c2 = [&](int row, int i, int j, double c) {
    t.emplace_back(row, g.i2(i, j + 1), c / dz);
    t.emplace_back(row, g.i2(i, j), -c / dz);
  };

  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nz; ++j) {
      const int r = i * nz + j;
      const double s = g.zc(j) * m.dh[i] / m.h[i];
      t.emplace_back(r, g.i1(i, j), 1.0 / dx);
      t.emplace_back(r, g.i1(i - 1, j), -1.0 / dx);
      for (int f : {i - 1, i})
        for (int k : {j, j + 1}) add_cz(r, f, k, -0.25 * s);
      gr.w[r] = m.h[i] * dx * dz;
      const int rd = off_d + r;
      add_c2(rd, i, j, 1.0 / m.h[i]);
      gr.w[rd] = m.h[i] * dx * dz;
    }
  for (int f = 0; f < nx; ++f)
    for (int k = 0; k <= nz; ++k) {
      const int r = f * (nz + 1) + k;
      const double wk = (k == 0 || k == nz) ? 0.5 : 1.0;
      const int rb = off_b + r;
      add_cz(rb, f, k, 1.0 / m.hf[f]);
      gr.w[rb] = m.hf[f] * dx * dz * wk;

      const int rc = off_c + r;
      t.emplace_back(rc, g.i2(f + 1, k), 1.0 / dx);
      t.emplace_back(rc, g.i2(f, k), -1.0 / dx);
      const double s = g.z(k) * m.dhf[f] / m.hf[f];
      int cnt = 0;
      for (int j : {k - 1, k})
        if (j >= 0 && j < nz) cnt += 2;
      for (int j : {k - 1, k}) {
        if (j < 0 || j >= nz) continue;
        add_c2(rc, f, j, -s / cnt);
        add_c2(rc, f + 1, j, -s / cnt);
      }
      gr.w[rc] = m.hf[f] * dx * dz * wk;
    }
  gr.G.resize(rows, g.nu());
  gr.G.setFromTriplets(t.begin(), t.end());
  return gr;
}

SpMat viscous(const Gradient& gr) {
  Eigen::Map<const Eigen::VectorXd> w(gr.w.data(), static_cast<long>(gr.w.size()));
  SpMat WG = w.asDiagonal() * gr.G;
  SpMat Gt = gr.G.transpose();
  return Gt * WG;
}

SpMat advection(const FluidGrid& g, const Metric& m, const Vec& adv, const Vec& hdot) {
  const double dx = g.dx(), dz = g.dz();
  const int nx = g.nx, nz = g.nz;
  Triplets t;
  t.reserve(static_cast<size_t>(g.nu()) * 4);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nz; ++j) {
      const int row = g.i1(i, j);
      const double a1 = adv[row];
      const double z = g.zc(j);
      double a2 = 0.25 * (adv[g.i2(i, j)] + adv[g.i2(i + 1, j)] + adv[g.i2(i, j + 1)] +
                          adv[g.i2(i + 1, j + 1)]);
      a2 -= z * 0.5 * (hdot[i] + hdot[wrap(i + 1, nx)]);
      const double at = (a2 - z * m.dhf[i] * a1) / m.hf[i];
      t.emplace_back(row, g.i1(i + 1, j), a1 / (2.0 * dx));
      t.emplace_back(row, g.i1(i - 1, j), -a1 / (2.0 * dx));
      const double c = at / (2.0 * dz);
      // reflected ghosts carry the no-slip walls
      if (j + 1 < nz) t.emplace_back(row, g.i1(i, j + 1), c);
      else t.emplace_back(row, row, -c);
      if (j > 0) t.emplace_back(row, g.i1(i, j - 1), -c);
      else t.emplace_back(row, row, c);
    }
  for (int i = 0; i < nx; ++i)
    for (int k = 1; k < nz; ++k) {
      const int row = g.i2(i, k);
      const double a1 = 0.25 * (adv[g.i1(i - 1, k - 1)] + adv[g.i1(i, k - 1)] +
                                adv[g.i1(i - 1, k)] + adv[g.i1(i, k)]);
      const double z = g.z(k);
      const double a2 = adv[row] - z * hdot[i];
      const double at = (a2 - z * m.dh[i] * a1) / m.h[i];
      t.emplace_back(row, g.i2(i + 1, k), a1 / (2.0 * dx));
      t.emplace_back(row, g.i2(i - 1, k), -a1 / (2.0 * dx));
      t.emplace_back(row, g.i2(i, k + 1), at / (2.0 * dz));
      t.emplace_back(row, g.i2(i, k - 1), -at / (2.0 * dz));
    }
  SpMat C(g.nu(), g.nu());
  C.setFromTriplets(t.begin(), t.end());
  return C;
}

Momentum momentum(const FluidGrid& g, const Metric& m0, const Metric& m1, const Vec& u0,
                  const Vec& hdot, double dt, double rho_f, double mu, const Vec* force) {
  const Vec V0 = volumes(g, m0);
  const Vec V1 = volumes(g, m1);
  const int nu = g.nu();
  Eigen::Map<const Eigen::VectorXd> v1(V1.data(), nu);

  SpMat K = v1.asDiagonal() * advection(g, m1, u0, hdot);
  SpMat Kt = K.transpose();
  SpMat S = (0.5 * rho_f) * (K - Kt) + mu * viscous(gradient(g, m1));
  Eigen::VectorXd diag(nu);
  for (int r = 0; r < nu; ++r) diag[r] = rho_f * (V0[r] + 0.5 * (V1[r] - V0[r])) / dt;
  SpMat D(nu, nu);
  D.reserve(Eigen::VectorXi::Constant(nu, 1));
  for (int r = 0; r < nu; ++r) D.insert(r, r) = diag[r];
  S += D;

  Momentum mo;
  mo.S = std::move(S);
  mo.b.resize(nu);
  for (int r = 0; r < nu; ++r) {
    mo.b[r] = rho_f * V0[r] * u0[r] / dt;
    if (force) mo.b[r] += V1[r] * (*force)[r];
  }
  return mo;
}

}  // namespace beamfsi::fluid
