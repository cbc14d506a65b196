#include "beamfsi/fields.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "beamfsi/kernels.hpp"
#include "beamfsi/spectral.hpp"

namespace beamfsi {

ContainerGrid ContainerGrid::make(int nx, double L, double M_min, int cells_per_unit) {
  require(nx >= 3, "container needs nx >= 3");
  require(cells_per_unit >= 2, "container needs at least 2 cells per unit height");
  require(M_min >= 1.0, "container bound M must be at least 1");
  ContainerGrid g;
  g.nx = nx;
  g.L = L;
  g.dy = 1.0 / cells_per_unit;
  g.j0 = cells_per_unit;
  g.ny = static_cast<int>(std::ceil((2.0 * M_min + 1.0) * cells_per_unit - 1e-9));
  g.M = 0.5 * (g.ny * g.dy - 1.0);
  return g;
}

bool ContainerGrid::operator==(const ContainerGrid& o) const {
  return nx == o.nx && ny == o.ny && j0 == o.j0 && L == o.L && M == o.M && dy == o.dy;
}

Vec face_heights(const Vec& h) {
  const int n = static_cast<int>(h.size());
  Vec H(n);
  for (int f = 0; f < n; ++f) H[f] = 0.5 * (h[f] + h[wrap(f + 1, n)]);
  return H;
}

Region region_psi(const ContainerGrid& g, const Vec& H, int f, int j) {
  if (j <= g.j0) return Region::Substrate;
  return g.y(j) >= H[f] ? Region::Virtual : Region::Fluid;
}

Region region_u1(const ContainerGrid& g, const Vec& H, int f, int j) {
  if (j + 1 <= g.j0) return Region::Substrate;
  return g.y(j) >= H[f] ? Region::Virtual : Region::Fluid;
}

Region region_u2(const ContainerGrid& g, const Vec& H, int i, int j) {
  if (j <= g.j0) return Region::Substrate;
  const double top = std::max(H[wrap(i - 1, g.nx)], H[i]);
  return g.y(j) >= top ? Region::Virtual : Region::Fluid;
}

ExtendedField ExtendedField::zeros(const ContainerGrid& g) {
  ExtendedField w;
  w.grid = g;
  w.u1.assign(static_cast<size_t>(g.ny) * g.nx, 0.0);
  w.u2.assign(static_cast<size_t>(g.ny + 1) * g.nx, 0.0);
  return w;
}

Vec ExtendedField::top_trace() const {
  return Vec(u2.begin() + static_cast<long>(grid.ny) * grid.nx, u2.end());
}

Vec divergence(const ExtendedField& w) {
  const auto& g = w.grid;
  Vec div(static_cast<size_t>(g.ny) * g.nx);
  const double dx = g.dx();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      div[j * g.nx + i] = (w.U1(i, j) - w.U1(wrap(i - 1, g.nx), j)) / dx +
                          (w.U2(i, j + 1) - w.U2(i, j)) / g.dy;
    }
  return div;
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double StreamFunction::sample(int f, double y) const {
  return kernels::cubic_at(psi.data() + f, grid.nx, grid.ny + 1, {-1.0, grid.dy}, y);
}

void SobolevConfig::validate() const {
  if (!(kappa > 0.0 && kappa < 0.5)) throw ConfigError("Sobolev kappa must lie in (0, 1/2)");
  if (!(s > 0.0 && s < kappa / 2.0)) throw ConfigError("Sobolev s must lie in (0, kappa/2)");
}

namespace {

double bump01(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return std::exp(-1.0 / (t * (1.0 - t)));
}

double bump_integral(double t) {
  using boost::math::quadrature::gauss_kronrod;
  if (t <= 0.0) return 0.0;
  return gauss_kronrod<double, 61>::integrate(bump01, 0.0, std::min(t, 1.0), 12, 1e-15);
}

double bump_total() {
  static const double total = bump_integral(1.0);
  return total;
}

double level_weight(int j, int nlev) { return (j == 0 || j == nlev - 1) ? 0.5 : 1.0; }

}  // namespace

double smooth_step(double s) {
  if (s <= 0.5) return 0.0;
  if (s >= 1.0) return 1.0;
  return bump_integral(2.0 * s - 1.0) / bump_total();
}

double smooth_step_derivative(double s) {
  if (s <= 0.5 || s >= 1.0) return 0.0;
  return 2.0 * bump01(2.0 * s - 1.0) / bump_total();
}

Vec face_antiderivative(const Vec& d, double L) {
  const int n = static_cast<int>(d.size());
  const double dx = L / n;
  Vec b(n);
  double acc = 0.0;
  for (int f = 0; f < n; ++f) {
    acc += d[f] * dx;
    b[f] = acc;
  }
  const double m = spectral::mean(b);
  for (double& v : b) v -= m;
  return b;
}

namespace {

void check_mean_free(const Vec& d, const char* who) {
  double scale = 1.0;
  for (double v : d) scale = std::max(scale, std::abs(v));
  if (std::abs(spectral::mean(d)) > 1e-12 * scale) {
    throw ConfigError(std::string(who) + ": d must be mean-free (mean " +
                      std::to_string(spectral::mean(d)) + ")");
  }
}

/// Spectral antiderivative evaluated at the faces x_{i+1/2}.
Vec spectral_face_antiderivative(const Vec& d, double L) {
  const int n = static_cast<int>(d.size());
  auto c = spectral::coefficients(d);
  const double dx = L / n;
  const std::complex<double> I(0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    const double kk = spectral::wavenumber(k, n, L);
    if (k == 0 || (n % 2 == 0 && k == n / 2)) {
      c[k] = 0.0;
    } else {
      c[k] *= std::exp(I * kk * 0.5 * dx) / (I * kk);
    }
  }
  return spectral::synthesize(c);
}

}  // namespace

ExtendedField extend(const ExtendedField& v, const Vec& d, const Vec& h,
                     const ExtendOptions& opt, ExtendReport* report) {
  const auto& g = v.grid;
  if (static_cast<int>(d.size()) != g.nx || static_cast<int>(h.size()) != g.nx) {
    throw ConfigError("extend: d/h size does not match the container grid");
  }
  for (double hv : h) {
    if (hv > g.top()) throw ConfigError("extend: height exceeds the container");
  }
  const Vec H = face_heights(h);
  ExtendedField out = ExtendedField::zeros(g);
  out.h = h;
  for (int j = 0; j < g.ny; ++j)
    for (int f = 0; f < g.nx; ++f) {
      if (region_u1(g, H, f, j) == Region::Fluid) out.U1(f, j) = v.U1(f, j);
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      switch (region_u2(g, H, i, j)) {
        case Region::Fluid: out.U2(i, j) = v.U2(i, j); break;
        case Region::Virtual: out.U2(i, j) = d[i]; break;
        case Region::Substrate: break;
      }
    }

  double scale = std::max({1.0, max_abs(d), max_abs(v.u1), max_abs(v.u2)});
  double mismatch = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    int jf = -1;
    for (int j = g.ny; j > g.j0; --j) {
      if (region_u2(g, H, i, j) == Region::Fluid) {
        jf = j;
        break;
      }
    }
    if (jf < 0) continue;
    double tr = v.U2(i, jf);
    if (jf - 1 > g.j0) tr += (h[i] - g.y(jf)) * (v.U2(i, jf) - v.U2(i, jf - 1)) / g.dy;
    mismatch = std::max(mismatch, std::abs(tr - d[i]));
  }
  if (report) {
    report->trace_mismatch = mismatch;
    report->max_divergence = max_abs(divergence(out));
  }
  if (mismatch > opt.trace_tolerance * scale) {
    throw NumericalError("extend: interface trace mismatch " + std::to_string(mismatch) +
                         " exceeds tolerance");
  }
  return out;
}

std::pair<ExtendedField, Vec> restrict_to_fluid(const ExtendedField& w) {
  if (w.h.empty()) throw ConfigError("restrict_to_fluid: field carries no region tags");
  const auto& g = w.grid;
  const Vec H = face_heights(w.h);
  ExtendedField v = ExtendedField::zeros(g);
  v.h = w.h;
  for (int j = 0; j < g.ny; ++j)
    for (int f = 0; f < g.nx; ++f)
      if (region_u1(g, H, f, j) == Region::Fluid) v.U1(f, j) = w.U1(f, j);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (region_u2(g, H, i, j) == Region::Fluid) v.U2(i, j) = w.U2(i, j);
  return {std::move(v), w.top_trace()};
}

ExtendedField lift(const Vec& d, double lambda, const ContainerGrid& g) {
  if (static_cast<int>(d.size()) != g.nx) throw ConfigError("lift: size mismatch");
  if (!(lambda > 0.0)) throw ConfigError("lift: lambda must be positive");
  check_mean_free(d, "lift");
  const Vec b = spectral_face_antiderivative(d, g.L);
  ExtendedField w = ExtendedField::zeros(g);
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.y_half(j);
    if (y <= 0.0) continue;
    const double zp = smooth_step_derivative(y / lambda) / lambda;
    for (int f = 0; f < g.nx; ++f) w.U1(f, j) = -b[f] * zp;
  }
  for (int j = g.j0 + 1; j <= g.ny; ++j) {
    const double z = smooth_step(g.y(j) / lambda);
    for (int i = 0; i < g.nx; ++i) w.U2(i, j) = d[i] * z;
  }
  return w;
}

StreamFunction lift_stream(const Vec& d, double lambda, const ContainerGrid& g) {
  if (static_cast<int>(d.size()) != g.nx) throw ConfigError("lift_stream: size mismatch");
  if (!(lambda > 0.0)) throw ConfigError("lift_stream: lambda must be positive");
  check_mean_free(d, "lift_stream");
  StreamFunction s;
  s.grid = g;
  s.psi.assign(static_cast<size_t>(g.ny + 1) * g.nx, 0.0);
  s.b = face_antiderivative(d, g.L);
  for (int j = g.j0 + 1; j <= g.ny; ++j) {
    const double z = smooth_step(g.y(j) / lambda);
    for (int f = 0; f < g.nx; ++f) s.at(f, j) = s.b[f] * z;
  }
  s.b.assign(s.psi.end() - g.nx, s.psi.end());
  return s;
}

StreamFunction stream_function(const ExtendedField& w, const StreamOptions& opt) {
  const auto& g = w.grid;
  StreamFunction s;
  s.grid = g;
  s.h = w.h;
  s.psi.assign(static_cast<size_t>(g.ny + 1) * g.nx, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int f = 0; f < g.nx; ++f) s.at(f, j + 1) = s.at(f, j) - g.dy * w.U1(f, j);
  double res = 0.0;
  const double dx = g.dx();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double dpsi = (s.at(i, j) - s.at(wrap(i - 1, g.nx), j)) / dx;
      res = std::max(res, std::abs(dpsi - w.U2(i, j)));
    }
  s.consistency_residual = res;
  const double scale = std::max({1.0, max_abs(w.u1), max_abs(w.u2)});
  if (res > opt.tolerance * scale) {
    throw NumericalError("stream_function: integration path inconsistency, residual " +
                         std::to_string(res));
  }
  s.b.assign(s.psi.end() - g.nx, s.psi.end());
  if (!w.h.empty()) {
    for (int f = 0; f < g.nx; ++f) {
      if (std::min(w.h[f], w.h[wrap(f + 1, g.nx)]) <= opt.eps_c) s.contact_columns.push_back(f);
    }
  }
  return s;
}

ExtendedField curl(const StreamFunction& s) {
  const auto& g = s.grid;
  ExtendedField w = ExtendedField::zeros(g);
  w.h = s.h;
  const double dx = g.dx();
  for (int j = 0; j < g.ny; ++j)
    for (int f = 0; f < g.nx; ++f) w.U1(f, j) = -(s.at(f, j + 1) - s.at(f, j)) / g.dy;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) w.U2(i, j) = (s.at(i, j) - s.at(wrap(i - 1, g.nx), j)) / dx;
  return w;
}

ExtendedField vertical_contraction(const ExtendedField& v, double sigma) {
  if (!(sigma >= 1.0)) throw ConfigError("vertical_contraction: sigma must be >= 1");
  if (sigma == 1.0) return v;
  StreamOptions so;
  so.tolerance = 1e300;
  const StreamFunction s = stream_function(v, so);
  const auto& g = v.grid;
  Vec targets(static_cast<size_t>(g.ny + 1) * g.nx);
  for (int j = 0; j <= g.ny; ++j)
    for (int f = 0; f < g.nx; ++f) targets[j * g.nx + f] = sigma * g.y(j);
  StreamFunction c = s;
  c.psi = kernels::resample_columns({s.psi.data(), g.nx, g.ny + 1}, {-1.0, g.dy}, targets,
                                    g.ny + 1);
  c.b.assign(c.psi.end() - g.nx, c.psi.end());
  ExtendedField out = curl(c);
  if (!v.h.empty()) {
    out.h = v.h;
    for (double& hv : out.h) hv /= sigma;
  }
  return out;
}

TraceResult trace_at_interface(const ExtendedField& v, const Profile& h) {
  const auto& g = v.grid;
  if (h.size() != g.nx) throw ConfigError("trace_at_interface: grid mismatch");
  for (double hv : h.h) {
    if (hv > g.top() || hv < 0.0) throw ConfigError("trace_at_interface: height outside container");
  }
  TraceResult r;
  r.t1.resize(g.nx);
  r.t2.resize(g.nx);
  for (int i = 0; i < g.nx; ++i) {
    const double y = h.h[i];
    r.t2[i] = kernels::cubic_at(v.u2.data() + i, g.nx, g.ny + 1, {-1.0, g.dy}, y);
    const double a = kernels::cubic_at(v.u1.data() + wrap(i - 1, g.nx), g.nx, g.ny,
                                       {-1.0 + 0.5 * g.dy, g.dy}, y);
    const double b = kernels::cubic_at(v.u1.data() + i, g.nx, g.ny, {-1.0 + 0.5 * g.dy, g.dy}, y);
    r.t1[i] = 0.5 * (a + b);
  }
  r.h_half_norm = std::sqrt(hs_norm_1d(r.t1, g.L, 0.5) * hs_norm_1d(r.t1, g.L, 0.5) +
                            hs_norm_1d(r.t2, g.L, 0.5) * hs_norm_1d(r.t2, g.L, 0.5));

  // H1 norm over the region below the graph
  const double dx = g.dx(), dy = g.dy;
  double l2 = 0.0, grad = 0.0;
  auto below = [&](int i, double y) { return y < h.h[wrap(i, g.nx)]; };
  for (int j = 0; j < g.ny; ++j)
    for (int f = 0; f < g.nx; ++f) {
      const double y = g.y_half(j);
      if (!(below(f, y) && below(f + 1, y))) continue;
      l2 += v.U1(f, j) * v.U1(f, j);
      const double gx = (v.U1(wrap(f + 1, g.nx), j) - v.U1(f, j)) / dx;
      grad += gx * gx;
      if (j + 1 < g.ny) {
        const double gy = (v.U1(f, j + 1) - v.U1(f, j)) / dy;
        grad += gy * gy;
      }
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double y = g.y(j);
      if (!below(i, y)) continue;
      l2 += v.U2(i, j) * v.U2(i, j);
      const double gx = (v.U2(wrap(i + 1, g.nx), j) - v.U2(i, j)) / dx;
      grad += gx * gx;
      if (j + 1 <= g.ny) {
        const double gy = (v.U2(i, j + 1) - v.U2(i, j)) / dy;
        grad += gy * gy;
      }
    }
  r.h1_norm = std::sqrt((l2 + grad) * dx * dy);
  r.ratio = r.h1_norm > 0.0 ? r.h_half_norm / r.h1_norm : 0.0;
  return r;
}

double hs_norm_1d(const Vec& d, double L, double order) {
  if (!(order >= 0.0 && order < 2.0)) throw ConfigError("hs_norm_1d: order out of range");
  if (order == 0.0) {
    double s = 0.0;
    for (double v : d) s += v * v;
    return std::sqrt(s * L / d.size());
  }
  return std::sqrt(spectral::symbol_norm_sq(
      d, L, [order](double k) { return std::pow(1.0 + k * k, order); }));
}

double h2s_norm_1d(const Vec& d, double L, const SobolevConfig& cfg) {
  return hs_norm_1d(d, L, 2.0 * cfg.s);
}

namespace {

double component_hs_sq(const Vec& f, int ncols, int nlev, bool trapezoid, const ContainerGrid& g,
                       double s) {
  const double dx = g.dx(), dy = g.dy;
  double total = 0.0;
  if (s == 0.0) {
    for (int j = 0; j < nlev; ++j) {
      const double w = trapezoid ? level_weight(j, nlev) : 1.0;
      for (int i = 0; i < ncols; ++i) total += w * f[j * ncols + i] * f[j * ncols + i];
    }
    return total * dx * dy;
  }
  Vec row(ncols);
  for (int j = 0; j < nlev; ++j) {
    const double w = trapezoid ? level_weight(j, nlev) : 1.0;
    std::copy(f.begin() + static_cast<long>(j) * ncols,
              f.begin() + static_cast<long>(j + 1) * ncols, row.begin());
    total += w * dy *
             spectral::symbol_norm_sq(row, g.L, [s](double k) { return std::pow(1.0 + k * k, s); });
  }
  total += dx * dy * dy * kernels::gagliardo_y_sum({f.data(), ncols, nlev}, {0.0, dy}, s);
  return total;
}

}  // namespace

double hs_norm(const ExtendedField& w, double s) {
  if (!(s >= 0.0 && s < 1.0)) throw ConfigError("hs_norm: s must lie in [0, 1)");
  const auto& g = w.grid;
  return std::sqrt(component_hs_sq(w.u1, g.nx, g.ny, false, g, s) +
                   component_hs_sq(w.u2, g.nx, g.ny + 1, true, g, s));
}

double hs_norm(const ExtendedField& w, const SobolevConfig& cfg) { return hs_norm(w, cfg.s); }

double xs_norm(const CouplePair& p, const SobolevConfig& cfg) {
  return hs_norm(p.w, cfg) + h2s_norm_1d(p.d, p.w.grid.L, cfg);
}

double x0_inner(const CouplePair& a, const CouplePair& b, double rho_f, double rho_s) {
  const auto& g = a.w.grid;
  if (!(g == b.w.grid)) throw ConfigError("x0_inner: grid mismatch");
  double fl = 0.0;
  for (size_t k = 0; k < a.w.u1.size(); ++k) fl += a.w.u1[k] * b.w.u1[k];
  for (int j = 0; j <= g.ny; ++j) {
    const double wl = level_weight(j, g.ny + 1);
    for (int i = 0; i < g.nx; ++i) fl += wl * a.w.U2(i, j) * b.w.U2(i, j);
  }
  double be = 0.0;
  for (size_t i = 0; i < a.d.size(); ++i) be += a.d[i] * b.d[i];
  return rho_f * fl * g.dx() * g.dy + rho_s * be * g.dx();
}

CouplePair difference(const CouplePair& a, const CouplePair& b) {
  if (!(a.w.grid == b.w.grid)) throw ConfigError("difference: grid mismatch");
  CouplePair r = a;
  for (size_t k = 0; k < r.w.u1.size(); ++k) r.w.u1[k] -= b.w.u1[k];
  for (size_t k = 0; k < r.w.u2.size(); ++k) r.w.u2[k] -= b.w.u2[k];
  for (size_t k = 0; k < r.d.size(); ++k) r.d[k] -= b.d[k];
  return r;
}

CouplePair projector_competitor(const CouplePair& pair, const Profile& h, const Profile& hb,
                                const SobolevConfig& cfg) {
  cfg.validate();
  const auto& g = pair.w.grid;
  if (h.size() != g.nx || hb.size() != g.nx || static_cast<int>(pair.d.size()) != g.nx) {
    throw ConfigError("projector_competitor: grid mismatch");
  }
  for (double v : pair.w.u1)
    if (!std::isfinite(v)) throw NumericalError("projector_competitor: non-finite input field");
  for (double v : pair.w.u2)
    if (!std::isfinite(v)) throw NumericalError("projector_competitor: non-finite input field");
  (void)ale_map(h, hb);  // validates hb <= h

  StreamOptions so;
  so.tolerance = 1e300;
  const StreamFunction psi = stream_function(pair.w, so);
  const Vec H = face_heights(h.h);
  const Vec Hb = face_heights(hb.h);

  StreamFunction out;
  out.grid = g;
  out.h = hb.h;
  out.psi.assign(static_cast<size_t>(g.ny + 1) * g.nx, 0.0);
  Vec G(g.nx);
  for (int f = 0; f < g.nx; ++f) {
    const double m = (H[f] + 1.0) / (Hb[f] + 1.0);
    G[f] = psi.sample(f, m - 1.0);
    for (int j = g.j0 + 1; j <= g.ny; ++j) {
      out.at(f, j) = psi.sample(f, m * (g.y(j) + 1.0) - 1.0) - G[f];
    }
  }
  out.b.assign(out.psi.end() - g.nx, out.psi.end());

  CouplePair r;
  r.w = curl(out);
  r.d.resize(g.nx);
  const double dx = g.dx();
  for (int i = 0; i < g.nx; ++i) r.d[i] = pair.d[i] - (G[i] - G[wrap(i - 1, g.nx)]) / dx;
  return r;
}

std::vector<std::pair<double, double>> positivity_components(const StreamFunction& psi) {
  const auto& g = psi.grid;
  std::vector<std::pair<double, double>> out;
  if (psi.contact_columns.empty()) return out;
  std::vector<char> contact(g.nx, 0);
  for (int f : psi.contact_columns) contact[f] = 1;
  const auto& cc = psi.contact_columns;
  for (size_t a = 0; a < cc.size(); ++a) {
    const int fa = cc[a];
    const int fb = a + 1 < cc.size() ? cc[a + 1] : cc[0] + g.nx;
    if (fb - fa >= 2) out.emplace_back(g.x_face(fa), g.x_face(fa) + (fb - fa) * g.dx());
  }
  return out;
}

CutoffResult contact_cutoff(const StreamFunction& psi, std::pair<double, double> interval,
                            double eps) {
  const auto& g = psi.grid;
  const double dx = g.dx();
  const auto [a, b] = interval;
  bool found = false;
  for (const auto& c : positivity_components(psi)) {
    if (std::abs(c.first - a) < 0.25 * dx && std::abs(c.second - b) < 0.25 * dx) found = true;
  }
  if (!found) throw ConfigError("contact_cutoff: interval is not a positivity component");
  if (!(eps > 0.0 && eps < (b - a) / 4.0)) {
    throw ConfigError("contact_cutoff: eps must lie in (0, (b-a)/4)");
  }

  const int fa = static_cast<int>(std::lround((a - 0.5 * dx) / dx));
  const int span = static_cast<int>(std::lround((b - a) / dx));
  auto chi = [&](double x) {
    const double lo = (x - a - 0.5 * eps) / (0.5 * eps);
    const double hi = (b - 0.5 * eps - x) / (0.5 * eps);
    return smooth_step(0.5 * (1.0 + lo)) * smooth_step(0.5 * (1.0 + hi));
  };
  // chi at every face, indexed by offset from fa (unwrapped positions)
  Vec cf(g.nx, 0.0);
  for (int o = 1; o < span; ++o) cf[wrap(fa + o, g.nx)] = chi(a + o * dx);

  StreamFunction cut = psi;
  for (int j = 0; j <= g.ny; ++j)
    for (int f = 0; f < g.nx; ++f) cut.at(f, j) = cf[f] * psi.at(f, j);
  cut.b.assign(cut.psi.end() - g.nx, cut.psi.end());

  CutoffResult r;
  r.pair.w = curl(cut);
  r.pair.d.resize(g.nx);
  for (int i = 0; i < g.nx; ++i) r.pair.d[i] = (cut.b[i] - cut.b[wrap(i - 1, g.nx)]) / dx;

  StripReport& rep = r.report;
  for (int o = 0; o <= span; ++o) {
    const double x = a + o * dx;
    const double dchi = (chi(x + dx) - chi(x - dx)) / (2.0 * dx);
    const double ddchi = (chi(x + dx) - 2.0 * chi(x) + chi(x - dx)) / (dx * dx);
    rep.chi_d_scaled = std::max(rep.chi_d_scaled, eps * std::abs(dchi));
    rep.chi_dd_scaled = std::max(rep.chi_dd_scaled, eps * eps * std::abs(ddchi));
  }
  const double chi_dd_max = rep.chi_dd_scaled / (eps * eps);

  for (int o = 0; o <= span; ++o) {
    const double x = a + o * dx;
    const bool inside = x > a + 0.5 * eps && x < b - 0.5 * eps;
    if (inside) continue;
    const int f = wrap(fa + o, g.nx);
    for (int j = 0; j <= g.ny; ++j)
      if (cut.at(f, j) != 0.0) rep.support_ok = false;
  }

  const ExtendedField u = curl(psi);
  const int n = static_cast<int>(std::floor(eps / dx + 1e-9));
  rep.strip_cells = n;
  const double c4 = eps * eps / 4.0;
  for (int side = 0; side < 2; ++side) {
    double lhs = 0.0, rhs = 0.0, blhs = 0.0, brhs = 0.0, cross = 0.0;
    for (int m = 1; m <= n; ++m) {
      const int f = side == 0 ? wrap(fa + m, g.nx) : wrap(fa + span - m, g.nx);
      const int node = side == 0 ? wrap(fa + m, g.nx) : wrap(fa + span - m + 1, g.nx);
      const double x = side == 0 ? a + m * dx : b - m * dx;
      const double ddchi = (chi(x + dx) - 2.0 * chi(x) + chi(x - dx)) / (dx * dx);
      for (int j = 0; j <= g.ny; ++j) {
        const double w = level_weight(j, g.ny + 1);
        const double p2 = 0.5 * psi.at(f, j) * psi.at(f, j);
        lhs += w * p2;
        cross += w * p2 * ddchi;
        rhs += w * u.U2(node, j) * u.U2(node, j);
      }
      for (int j = 0; j < g.ny; ++j) rhs += u.U1(f, j) * u.U1(f, j);
      blhs += 0.5 * psi.b[f] * psi.b[f];
      const double db = (psi.b[node] - psi.b[wrap(node - 1, g.nx)]) / dx;
      brhs += db * db;
    }
    rep.fluid_lhs[side] = lhs * dx * g.dy;
    rep.fluid_rhs[side] = c4 * rhs * dx * g.dy;
    rep.beam_lhs[side] = blhs * dx;
    rep.beam_rhs[side] = c4 * brhs * dx;
    rep.cross_term += cross * dx * g.dy;
    if (rep.fluid_lhs[side] > rep.fluid_rhs[side] * (1.0 + 1e-12) + 1e-300) ++rep.violations;
    if (rep.beam_lhs[side] > rep.beam_rhs[side] * (1.0 + 1e-12) + 1e-300) ++rep.violations;
  }
  rep.cross_bound = chi_dd_max * (rep.fluid_rhs[0] + rep.fluid_rhs[1]);
  if (std::abs(rep.cross_term) > rep.cross_bound * (1.0 + 1e-12) + 1e-300) ++rep.violations;
  return r;
}

Vec mollifier_weights(int n, double L, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("mollify_periodic: gamma must be positive");
  const double dx = L / n;
  const int reach = std::min(n / 2, static_cast<int>(std::ceil(gamma / dx)));
  Vec w;
  double total = 0.0;
  for (int m = -reach; m <= reach; ++m) {
    const double t = m * dx / gamma;
    const double v = std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
    w.push_back(v);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

Vec mollify_periodic(const Vec& eta, double L, double gamma) {
  const int n = static_cast<int>(eta.size());
  const Vec w = mollifier_weights(n, L, gamma);
  const int reach = static_cast<int>(w.size() / 2);
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int m = -reach; m <= reach; ++m) acc += w[m + reach] * (eta[wrap(i + m, n)] - eta[i]);
    out[i] = eta[i] + acc;
  }
  return out;
}

namespace {

constexpr std::uint32_t kFieldVersion = 1;

struct FieldHeader {
  char magic[8];
  std::uint32_t version;
  std::uint32_t nx, ny, j0;
  std::uint32_t dtype;  // 1 = float64
  std::uint32_t nh;
  double L, M, dy;
};

void write_arrays(const std::filesystem::path& path, const char* magic, const ContainerGrid& g,
                  const Vec& h, const std::vector<std::pair<std::string, const Vec*>>& arrays,
                  int rows_extra) {
  FieldHeader hd{};
  std::memcpy(hd.magic, magic, 8);
  hd.version = kFieldVersion;
  hd.nx = g.nx;
  hd.ny = g.ny;
  hd.j0 = g.j0;
  hd.dtype = 1;
  hd.nh = static_cast<std::uint32_t>(h.size());
  hd.L = g.L;
  hd.M = g.M;
  hd.dy = g.dy;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(&hd), sizeof hd);
  out.write(reinterpret_cast<const char*>(h.data()), h.size() * sizeof(double));
  nlohmann::json side;
  side["kind"] = std::string(magic, 8);
  side["version"] = kFieldVersion;
  side["grid"] = {{"nx", g.nx}, {"ny", g.ny}, {"j0", g.j0}, {"L", g.L}, {"M", g.M}, {"dy", g.dy}};
  side["dtype"] = "float64";
  side["layout"] = "row-major, rows are y levels from y=-1 upward, columns are x positions";
  size_t offset = sizeof hd + h.size() * sizeof(double);
  side["arrays"] = nlohmann::json::array();
  side["arrays"].push_back({{"name", "h"}, {"rows", 1}, {"cols", h.size()},
                            {"offset", sizeof hd}, {"positions", "nodes"}});
  for (const auto& [name, v] : arrays) {
    out.write(reinterpret_cast<const char*>(v->data()), v->size() * sizeof(double));
    side["arrays"].push_back({{"name", name},
                              {"rows", v->size() / g.nx},
                              {"cols", g.nx},
                              {"offset", offset}});
    offset += v->size() * sizeof(double);
  }
  (void)rows_extra;
  if (!out) throw IoError("write failed: " + path.string());
  std::ofstream js(path.string() + ".json");
  js << side.dump(2) << '\n';
}

FieldHeader read_header(std::ifstream& in, const std::filesystem::path& path, const char* magic) {
  FieldHeader hd{};
  in.read(reinterpret_cast<char*>(&hd), sizeof hd);
  if (!in || std::memcmp(hd.magic, magic, 8) != 0 || hd.version != kFieldVersion ||
      hd.dtype != 1) {
    throw IoError("not a supported field file: " + path.string());
  }
  return hd;
}

void read_vec(std::ifstream& in, Vec& v, size_t n, const std::filesystem::path& path) {
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()), n * sizeof(double));
  if (!in) throw IoError("truncated field file: " + path.string());
}

ContainerGrid grid_of(const FieldHeader& hd) {
  ContainerGrid g;
  g.nx = hd.nx;
  g.ny = hd.ny;
  g.j0 = hd.j0;
  g.L = hd.L;
  g.M = hd.M;
  g.dy = hd.dy;
  return g;
}

}  // namespace

void save_field(const std::filesystem::path& path, const ExtendedField& w) {
  write_arrays(path, "BFSIFLD1", w.grid, w.h, {{"u1", &w.u1}, {"u2", &w.u2}}, 0);
}

ExtendedField load_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  const FieldHeader hd = read_header(in, path, "BFSIFLD1");
  ExtendedField w;
  w.grid = grid_of(hd);
  read_vec(in, w.h, hd.nh, path);
  read_vec(in, w.u1, static_cast<size_t>(hd.ny) * hd.nx, path);
  read_vec(in, w.u2, static_cast<size_t>(hd.ny + 1) * hd.nx, path);
  return w;
}

void save_stream(const std::filesystem::path& path, const StreamFunction& s) {
  write_arrays(path, "BFSIPSI1", s.grid, s.h, {{"psi", &s.psi}}, 0);
}

StreamFunction load_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  const FieldHeader hd = read_header(in, path, "BFSIPSI1");
  StreamFunction s;
  s.grid = grid_of(hd);
  read_vec(in, s.h, hd.nh, path);
  read_vec(in, s.psi, static_cast<size_t>(hd.ny + 1) * hd.nx, path);
  s.b.assign(s.psi.end() - hd.nx, s.psi.end());
  return s;
}

}  // namespace beamfsi
