#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "beamfsi/diagnostics.hpp"
#include "support/fixtures.hpp"

using namespace beamfsi;

namespace {
constexpr double kPi = std::numbers::pi;

SimState rest_state(int nx, int nz) {
  SimState s;
  s.fluid = FluidState::rest({nx, nz, 1.0});
  s.beam = {Vec(nx, 0.0), Vec(nx, 0.0)};
  return s;
}

/// Moving bump: eta0 = a cos, eta1 = b sin with the matching lift.
SimState moving_bump(int nx, int nz, double a = -0.1, double b = 0.3) {
  const FluidGrid g{nx, nz, 1.0};
  InitialData d;
  d.eta0.resize(nx);
  d.eta1.resize(nx);
  Vec h(nx);
  for (int i = 0; i < nx; ++i) {
    d.eta0[i] = a * std::cos(2 * kPi * i / nx);
    d.eta1[i] = b * std::cos(2 * kPi * i / nx);
    h[i] = 1.0 + d.eta0[i];
  }
  d.u0 = lift_state(g, d.eta1, h, 0.4);
  return initial_state(d);
}
}  // namespace

TEST(Coupled, RestStateIsFixedPoint) {
  Params p;
  const SimState s = rest_state(16, 8);
  const StepOutcome o = coupled_step(s, 0.01, p, {});
  for (double v : o.state.fluid.u) EXPECT_EQ(v, 0.0);
  for (double v : o.state.beam.eta) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(o.state.t, 0.01);
  EXPECT_EQ(o.state.step, 1);
}

TEST(Coupled, ConservationInvariantsHoldEveryStep) {
  Params p;
  SimState s = moving_bump(16, 8);
  for (int k = 0; k < 20; ++k) {
    const StepOutcome o = coupled_step(s, 5e-3, p, {});
    EXPECT_LE(std::abs(o.report.mean_eta_dot), 1e-12);
    EXPECT_LE(max_divergence(o.state.fluid, o.state.height()), 1e-10);
    EXPECT_LE(o.report.trace_mismatch, 1e-12);
    s = o.state;
  }
}

TEST(Coupled, MirrorSymmetryIsPreserved) {
  Params p;
  const int n = 16;
  SimState s = moving_bump(n, 8);
  for (int k = 0; k < 10; ++k) s = coupled_step(s, 5e-3, p, {}).state;
  for (int i = 0; i < n; ++i) {
    EXPECT_NEAR(s.beam.eta[i], s.beam.eta[(n - i) % n], 1e-11);
    EXPECT_NEAR(s.beam.eta_dot[i], s.beam.eta_dot[(n - i) % n], 1e-11);
    for (int j = 0; j < 8; ++j) EXPECT_NEAR(s.fluid.u1(i, j), -s.fluid.u1(n - 1 - i, j), 1e-11);
  }
}

TEST(Coupled, PartitionedAndMonolithicAgree) {
  Params p;
  SimState s = moving_bump(16, 8);
  CouplingConfig mono, part;
  part.mode = CouplingMode::Partitioned;
  part.tolerance = 1e-11;
  const StepOutcome a = coupled_step(s, 5e-3, p, mono);
  const StepOutcome b = coupled_step(s, 5e-3, p, part);
  for (size_t i = 0; i < a.state.beam.eta.size(); ++i)
    EXPECT_NEAR(a.state.beam.eta_dot[i], b.state.beam.eta_dot[i], 1e-8);
  for (size_t r = 0; r < a.state.fluid.u.size(); ++r)
    EXPECT_NEAR(a.state.fluid.u[r], b.state.fluid.u[r], 1e-8);
  EXPECT_GT(b.report.iterations, 1);
}

TEST(Coupled, SingleStepLedgerResidualShrinksWithDt) {
  Params p;
  const SimState s = moving_bump(16, 8, -0.05, 0.1);
  const double e0 = energy_terms(s, p).total();
  double prev = 0.0;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const StepOutcome o = coupled_step(s, dt, p, {});
    const double res =
        energy_terms(o.state, p).total() + o.report.viscous_increment + o.report.damping_increment - e0;
    EXPECT_LE(res, 1e-14);  // never energy-creating
    if (prev != 0.0) EXPECT_GT(prev / res, 1.8);
    prev = res;
  }
}

TEST(Contact, DetectionExamples) {
  SimState s = rest_state(16, 8);
  EXPECT_FALSE(detect_contact(s, 1e-6).has_value());
  for (int i = 0; i < 16; ++i) s.beam.eta[i] = -0.5 - 0.5 * std::cos(2 * kPi * (i - 5) / 16.0);
  const auto e = detect_contact(s, 1e-6);
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(e->node, 5);
  EXPECT_NEAR(e->min_height, 0.0, 1e-15);
}

TEST(Contact, UndampedRunHaltsAndEventTimeConverges) {
  config::SimConfig c = config::parse(R"(
[params]
gamma = 0.0
[grid]
nx = 16
nz = 8
T = 0.5
[initial]
u0 = "lift"
[initial.eta0]
kind = "cosine"
amplitude = -0.5
[initial.eta1]
kind = "cosine"
amplitude = -3.0
[contact]
eps_c = 0.25
)");
  const InitialData d = config::build_initial_data(c);
  Vec times;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    c.run.dt = dt;
    const Trajectory tr = run(c.run, initial_state(d));
    ASSERT_TRUE(tr.halted);
    ASSERT_EQ(tr.events.size(), 1u);
    EXPECT_EQ(tr.events[0].phase, ContactPhase::Halted);
    times.push_back(tr.events[0].time);
  }
  const double d1 = times[1] - times[0], d2 = times[2] - times[1];
  EXPECT_TRUE((d1 > 0 && d2 > 0) || (d1 < 0 && d2 < 0));
  EXPECT_LT(std::abs(d2), std::abs(d1));
}

TEST(Run, RestConfigGivesConstantTrajectory) {
  RunConfig c;
  c.grid = {16, 8, 1.0};
  c.dt = 0.05;
  c.T = 1.0;
  const Trajectory tr = run(c, rest_state(16, 8));
  EXPECT_EQ(tr.records.size(), 21u);
  EXPECT_FALSE(tr.halted);
  for (const auto& st : tr.samples)
    for (double v : st.fluid.u) EXPECT_EQ(v, 0.0);
  EXPECT_NEAR(tr.samples.back().t, 1.0, 1e-12);
}

TEST(Run, DampedBenchmarkKeepsPositiveHeight) {
  RunConfig c = support::bump_run(16, 8, 2e-3, 0.1);
  const Trajectory tr = run(c, moving_bump(16, 8));
  for (const auto& r : tr.records) EXPECT_GT(r.min_height, 0.0);
}

TEST(Run, SelfConvergenceUnderVerticalRefinement) {
  // start from rest; nz carries the wall layers, so refine it at fixed nx and dt
  auto amp = [](int nz) {
    RunConfig c = support::bump_run(8, nz, 2e-3, 0.25);
    const SimState s = run(c, moving_bump(8, nz, -0.1, 0.0)).samples.back();
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) acc += 2.0 * s.beam.eta_dot[i] * std::cos(2 * kPi * i / 8) / 8;
    return acc;
  };
  const double a = amp(8), b = amp(16), c = amp(32);
  EXPECT_GT(std::abs(a - b) / std::abs(b - c), 1.8);
}
