#include <cmath>

#include "beamfsi/solver.hpp"
#include "beamfsi/spectral.hpp"

namespace beamfsi {

Vec BeamState::height() const {
  Vec h(eta.size());
  for (size_t i = 0; i < eta.size(); ++i) h[i] = 1.0 + eta[i];
  return h;
}

BeamState beam_step(const BeamState& s, const Vec& phi, double dt, const Params& p,
                    double theta) {
  const int n = static_cast<int>(s.eta.size());
  require(static_cast<int>(s.eta_dot.size()) == n && static_cast<int>(phi.size()) == n,
          "beam_step: array sizes differ");
  require(dt > 0.0, "beam_step: dt must be positive");
  require(theta >= 0.5 && theta <= 1.0, "beam_step: theta must lie in [1/2, 1]");
  auto eh = spectral::coefficients(s.eta);
  auto vh = spectral::coefficients(s.eta_dot);
  const auto fh = spectral::coefficients(phi);
  for (int m = 0; m < n; ++m) {
    if (m == 0) {
      eh[0] += dt * vh[0];
      continue;
    }
    const double k = spectral::wavenumber(m, n, p.L);
    const double c = p.gamma * k * k;
    const double w2 = p.beta * k * k + p.alpha * k * k * k * k;
    const auto v = vh[m];
    const auto vnew =
        (p.rho_s * v - dt * (1.0 - theta) * c * v - dt * w2 * eh[m] -
         dt * dt * theta * (1.0 - theta) * w2 * v + dt * fh[m]) /
        (p.rho_s + dt * theta * c + dt * dt * theta * theta * w2);
    eh[m] += dt * (theta * vnew + (1.0 - theta) * v);
    vh[m] = vnew;
  }
  BeamState out;
  out.eta = spectral::synthesize(eh);
  out.eta_dot = spectral::synthesize(vh);
  return out;
}

double beam_stiffness_norm_sq(const Vec& eta, const Params& p) {
  return spectral::symbol_norm_sq(eta, p.L, [&p](double k) {
    return p.beta * k * k + p.alpha * k * k * k * k;
  });
}

double damping_rate(const Vec& eta_dot, const Params& p) {
  if (p.gamma == 0.0) return 0.0;
  return p.gamma * spectral::symbol_norm_sq(eta_dot, p.L, [](double k) { return k * k; });
}

}  // namespace beamfsi
