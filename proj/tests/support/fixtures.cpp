#include "support/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace beamfsi::support {

RunConfig bump_run(int nx, int nz, double dt, double T) {
  RunConfig c;
  c.grid = {nx, nz, 1.0};
  c.dt = dt;
  c.T = T;
  c.sample_every = 10;
  return c;
}

InitialData bump_data(const FluidGrid& g, double amplitude) {
  InitialData d;
  d.eta0.resize(g.nx);
  for (int i = 0; i < g.nx; ++i) d.eta0[i] = amplitude * std::cos(2.0 * std::numbers::pi * i / g.nx);
  d.eta1.assign(g.nx, 0.0);
  Vec h(g.nx);
  for (int i = 0; i < g.nx; ++i) h[i] = 1.0 + d.eta0[i];
  d.u0 = lift_state(g, d.eta1, h, 0.5 * (1.0 - std::abs(amplitude)));
  return d;
}

Profile random_profile(std::mt19937& rng, int n, double L) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int modes = 1 + static_cast<int>(U(rng) * 4);
  Vec a(modes), ph(modes);
  for (int m = 0; m < modes; ++m) {
    a[m] = (0.1 + 0.4 * U(rng)) / (m + 1);
    ph[m] = 2.0 * std::numbers::pi * U(rng);
  }
  auto raw = [&](double x) {
    double v = 0.0;
    for (int m = 0; m < modes; ++m) v += a[m] * std::cos(2.0 * std::numbers::pi * (m + 1) * x / L + ph[m]);
    return v;
  };
  double lo = 1e300;
  for (int i = 0; i < n; ++i) lo = std::min(lo, raw(i * L / n));
  const double floor = 0.3 * U(rng);
  return Profile::sample([&](double x) { return raw(x) - lo + floor; }, n, L);
}

StreamFunction random_contact_stream(std::mt19937& rng, int nx, int cells_per_unit, double L) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double k = 2.0 * std::numbers::pi / L;
  const double c = 0.5 + 0.3 * U(rng), amp = c + 0.1 + 0.3 * U(rng), ph = k * L * U(rng);
  const double a2 = 0.1 * U(rng);
  Vec h(nx);
  for (int i = 0; i < nx; ++i) {
    const double x = i * L / nx;
    h[i] = std::max(0.0, c + amp * std::cos(k * x + ph) + a2 * std::cos(2.0 * k * x));
  }
  Vec H = face_heights(h);

  const ContainerGrid g = ContainerGrid::make(nx, L, *std::max_element(H.begin(), H.end()),
                                              cells_per_unit);
  double r[6];
  for (double& v : r) v = 2.0 * U(rng) - 1.0;
  StreamFunction s;
  s.grid = g;
  s.h = h;
  s.psi.assign(static_cast<size_t>(g.ny + 1) * nx, 0.0);
  for (int f = 0; f < nx; ++f) {
    const double x = g.x_face(f);
    if (H[f] <= 0.0) {
      s.contact_columns.push_back(f);
      continue;
    }
    const double b = H[f] * H[f] * (r[0] + r[1] * std::sin(k * x) + r[2] * std::cos(2.0 * k * x));
    for (int j = g.j0 + 1; j <= g.ny; ++j) {
      const double y = g.y(j);
      if (y >= H[f]) {
        s.at(f, j) = b;
        continue;
      }
      const double t = y / H[f];
      const double bulk = H[f] * H[f] * t * t * (1.0 - t) * (1.0 - t) *
                          (r[3] + r[4] * std::cos(k * x + 3.0 * y) + r[5] * std::sin(5.0 * y));
      s.at(f, j) = b * t * t * (3.0 - 2.0 * t) + bulk;
    }
  }
  s.b.assign(s.psi.end() - nx, s.psi.end());
  return s;
}

TempDir::TempDir(const std::string& tag) {
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("beamfsi_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace beamfsi::support
