#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "beamfsi/spectral.hpp"
#include "support/fixtures.hpp"

using namespace beamfsi;

namespace {
constexpr double kPi = std::numbers::pi;

InitialData rest_data(const FluidGrid& g) {
  return {Vec(g.nx, 0.0), Vec(g.nx, 0.0), FluidState::rest(g)};
}

double l2_diff(const Vec& a, const Vec& b, double dx) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s * dx);
}
}  // namespace

TEST(InitialData, RestIsValid) {
  const InitialDataReport r = check_initial_data(rest_data({16, 8, 1.0}));
  EXPECT_TRUE(r.ok());
  EXPECT_DOUBLE_EQ(r.min_height, 1.0);
}

TEST(InitialData, ConstantBeamVelocityIsRejected) {
  const FluidGrid g{16, 8, 1.0};
  InitialData d = rest_data(g);
  d.eta1.assign(16, 0.3);
  const InitialDataReport r = check_initial_data(d);
  EXPECT_FALSE(r.ok());
  EXPECT_NEAR(r.mean_eta1, 0.3, 1e-15);
  EXPECT_THROW(validate_initial_data(d), ConfigError);
}

TEST(InitialData, CollapsedHeightIsRejected) {
  InitialData d = rest_data({16, 8, 1.0});
  d.eta0[3] = -1.0;
  const InitialDataReport r = check_initial_data(d);
  EXPECT_FALSE(r.ok());
  EXPECT_LE(r.min_height, 0.0);
}

TEST(InitialData, LiftedBumpIsValidAndSolenoidal) {
  const FluidGrid g{32, 16, 1.0};
  const InitialData d = support::bump_data(g);
  const InitialDataReport r = check_initial_data(d);
  EXPECT_TRUE(r.ok()) << (r.problems.empty() ? "" : r.problems.front());
  EXPECT_LT(r.max_divergence, 1e-12);
  EXPECT_LT(r.trace_mismatch, 1e-14);
}

TEST(InitialData, CornerStreamRoundTrip) {
  const FluidGrid g{32, 16, 1.0};
  const InitialData d = support::bump_data(g);
  Vec h(g.nx);
  for (int i = 0; i < g.nx; ++i) h[i] = 1.0 + d.eta0[i];
  const FluidState back = state_from_corner_stream(g, h, corner_stream(d.u0, h));
  for (size_t r = 0; r < back.u.size(); ++r) EXPECT_NEAR(back.u[r], d.u0.u[r], 1e-12);
}

TEST(Regularize, RestStaysRest) {
  Params p;
  const InitialData out = regularize_initial_data(rest_data({16, 8, 1.0}), 0.05, p);
  for (double v : out.eta0) EXPECT_NEAR(v, 0.0, 1e-15);
  for (double v : out.u0.u) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Regularize, OutputIsValidAndConvergesAsGammaHalves) {
  Params p;
  const FluidGrid g{64, 16, 1.0};
  InitialData d = support::bump_data(g);
  // a rougher beam velocity so the mollifier has something to do
  for (int i = 0; i < g.nx; ++i) d.eta1[i] = 0.3 * std::sin(2 * kPi * i / g.nx) + 0.1 * std::sin(6 * kPi * i / g.nx);
  Vec h(g.nx);
  for (int i = 0; i < g.nx; ++i) h[i] = 1.0 + d.eta0[i];
  d.u0 = lift_state(g, d.eta1, h, 0.45);
  const double C = spectral::h2_norm(d.eta0, p.L);
  const double hmin = *std::min_element(h.begin(), h.end());

  double prev_eta = 1e300, prev_vel = 1e300;
  for (double gamma : {0.1, 0.05, 0.025, 0.0125}) {
    RegularizeReport rep;
    const InitialData out = regularize_initial_data(d, gamma, p, &rep);
    EXPECT_TRUE(check_initial_data(out).ok());
    EXPECT_GE(rep.sigma, 1.0);
    EXPECT_GE(rep.min_height, hmin - C * gamma);
    const double de = l2_diff(out.eta0, d.eta0, g.dx());
    const double dv = l2_diff(out.eta1, d.eta1, g.dx());
    EXPECT_LT(de, prev_eta);
    EXPECT_LT(dv, prev_vel);
    prev_eta = de;
    prev_vel = dv;
  }
}

TEST(Regularize, InfeasibleGammaIsAConfigError) {
  Params p;
  const FluidGrid g{32, 16, 1.0};
  const InitialData d = support::bump_data(g, -0.4);
  EXPECT_THROW(regularize_initial_data(d, 0.2, p), ConfigError);
  EXPECT_THROW(regularize_initial_data(d, 0.0, p), Error);
}
