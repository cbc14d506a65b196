#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "beamfsi/geometry.hpp"
#include "support/fixtures.hpp"

using namespace beamfsi;

namespace {
constexpr double kPi = std::numbers::pi;
Profile cos_dip(int n) {
  return Profile::sample([](double x) { return 0.5 * (1.0 - std::cos(2 * kPi * x)); }, n, 1.0);
}
}  // namespace

TEST(PositivePartShift, InactiveClipIsPlainShift) {
  const Profile h = Profile::sample([](double x) { return 1.0 + 0.5 * std::sin(2 * kPi * x); }, 64, 1.0);
  const Profile s = positive_part_shift(h, 0.2);
  for (int i = 0; i < h.size(); ++i) {
    EXPECT_DOUBLE_EQ(s.h[i], h.h[i] - 0.2);
    EXPECT_DOUBLE_EQ(s.dh[i], h.dh[i]);
  }
}

TEST(PositivePartShift, ZeroShiftIsIdentity) {
  const Profile h = cos_dip(32);
  const Profile s = positive_part_shift(h, 0.0);
  EXPECT_EQ(s.h, h.h);
  EXPECT_EQ(s.dh, h.dh);
}

TEST(PositivePartShift, ClippedDipSatisfiesBoundByScan) {
  const Profile h = cos_dip(256);
  const double mu = 0.1;
  const Profile s = positive_part_shift(h, mu);
  for (int i = 0; i < h.size(); ++i) EXPECT_GE(s.h[i], 0.0);
  EXPECT_LE(w1inf_distance(s, h), mu + sublevel_slope_sup(h, mu) + 1e-14);
}

TEST(SublevelSlope, EmptyAndFullSublevelSets) {
  const Profile one = Profile::sample([](double) { return 1.0; }, 16, 1.0);
  EXPECT_EQ(sublevel_slope_sup(one, 0.5), 0.0);
  const Profile h = cos_dip(64);
  double mx = 0.0;
  for (double d : h.dh) mx = std::max(mx, std::abs(d));
  EXPECT_EQ(sublevel_slope_sup(h, 2.0), mx);
}

TEST(SublevelSlope, DecreasesTowardZero) {
  const Profile h = cos_dip(4096);
  const double a = sublevel_slope_sup(h, 0.1), b = sublevel_slope_sup(h, 0.05),
               c = sublevel_slope_sup(h, 0.025);
  EXPECT_GT(a, b);
  EXPECT_GT(b, c);
  // |h'| = pi sin(2 pi x) and h = sin^2(pi x): sup over {h <= mu} is 2 pi sqrt(mu (1 - mu))
  EXPECT_NEAR(c, 2 * kPi * std::sqrt(0.025 * 0.975), 0.01);
}

TEST(SublevelSlope, RandomProfilesObeyLemmaBound) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Profile h = support::random_profile(rng, 128);
    double prev = 1e300;
    for (double mu : {0.2, 0.1, 0.05}) {
      const double sup = sublevel_slope_sup(h, mu);
      EXPECT_LE(w1inf_distance(positive_part_shift(h, mu), h), mu + sup + 1e-13);
      EXPECT_LE(sup, prev);
      prev = sup;
    }
  }
}

TEST(W1inf, IdentityAndConstantShift) {
  const Profile h = cos_dip(32);
  EXPECT_EQ(w1inf_distance(h, h), 0.0);
  Profile g = h;
  for (double& v : g.h) v += 0.3;
  EXPECT_NEAR(w1inf_distance(h, g), 0.3, 1e-15);
}

TEST(W1inf, ClipDistanceConvergesUnderRefinement) {
  // h = sin(2 pi x), clip = max(h, 0): the gap is sup over h < 0 of |h| + |h'| = 1 + 2 pi
  double prev_err = 1e300;
  for (int n : {64, 256, 1024}) {
    const Profile h = Profile::sample([](double x) { return std::sin(2 * kPi * x); }, n, 1.0);
    Profile c = h;
    for (int i = 0; i < n; ++i)
      if (c.h[i] < 0.0) c.h[i] = c.dh[i] = 0.0;
    const double err = std::abs(w1inf_distance(h, c) - (1.0 + 2 * kPi));
    EXPECT_LT(err, prev_err + 1e-12);
    prev_err = err;
  }
  EXPECT_LT(prev_err, 1e-3);
}

TEST(AleMap, IdentityWhenEqual) {
  const Profile h = cos_dip(16);
  const AleMap a = ale_map(h, h);
  for (int i = 0; i < 16; ++i) {
    EXPECT_DOUBLE_EQ(a.m[i], 1.0);
    EXPECT_DOUBLE_EQ(a.dm[i], 0.0);
  }
  const auto c = a.cofactor(0.3, 0.2);
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_DOUBLE_EQ(c[1], 0.0);
  EXPECT_DOUBLE_EQ(c[2], 0.0);
  EXPECT_DOUBLE_EQ(c[3], 1.0);
}

TEST(AleMap, FlatToZeroDoublesTheStrip) {
  const Profile one = Profile::sample([](double) { return 1.0; }, 8, 1.0);
  const Profile zero = Profile::sample([](double) { return 0.0; }, 8, 1.0);
  const AleMap a = ale_map(one, zero);
  for (double m : a.m) EXPECT_DOUBLE_EQ(m, 2.0);
  const auto p = a.chi(0.25, 0.0);
  EXPECT_DOUBLE_EQ(p[0], 0.25);
  EXPECT_DOUBLE_EQ(p[1], 1.0);  // 2 y + 1
  const auto c = a.cofactor(0.25, -0.5);
  EXPECT_DOUBLE_EQ(c[0], 2.0);
  EXPECT_DOUBLE_EQ(c[2], 0.0);
  EXPECT_DOUBLE_EQ(c[3], 1.0);
}

TEST(AleMap, CofactorDeterminantIsM) {
  const Profile h = Profile::sample([](double x) { return 1.0 + 0.3 * std::sin(2 * kPi * x); }, 64, 1.0);
  const AleMap a = ale_map(h, positive_part_shift(h, 0.2));
  for (int i = 0; i < 64; ++i) {
    EXPECT_GE(a.m[i], 1.0);
    const double x = h.x(i);
    const auto c = a.cofactor(x, 0.4);
    EXPECT_NEAR(c[0] * c[3] - c[1] * c[2], a.m[i], 1e-14);
  }
  const auto p = a.chi(0.37, 0.1);
  const auto q = a.chi_inverse(p[0], p[1]);
  EXPECT_NEAR(q[1], 0.1, 1e-13);
}

TEST(AleMap, RejectsTargetAboveSource) {
  const Profile h = cos_dip(16);
  Profile g = h;
  for (double& v : g.h) v += 0.1;
  EXPECT_THROW(ale_map(h, g), ConfigError);
}

TEST(Envelope, ConstantTrajectoryGivesUniformShift) {
  const Profile h = Profile::sample([](double x) { return 1.0 + 0.1 * std::cos(2 * kPi * x); }, 32, 1.0);
  std::vector<TimedProfile> tr;
  for (int s = 0; s < 5; ++s) tr.push_back({0.1 * s, h});
  const LowerEnvelope e = build_lower_envelope(tr, 0.2);
  EXPECT_EQ(e.rows.size(), 1u);
  for (int i = 0; i < 32; ++i) EXPECT_NEAR(e.rows[0].h.h[i], h.h[i] - 2 * e.epsilon, 1e-15);
  EXPECT_EQ(e.check.below_violations, 0);
  EXPECT_EQ(e.check.gap_violations, 0);
}

TEST(Envelope, LargeDeltaGivesOneInterval) {
  std::vector<TimedProfile> tr;
  for (int s = 0; s < 6; ++s)
    tr.push_back({0.05 * s, Profile::sample([s](double x) { return 1.0 + 0.02 * s * std::cos(2 * kPi * x); },
                                            32, 1.0)});
  const LowerEnvelope e = build_lower_envelope(tr, 100.0);
  // delta / 4 fails the slope condition, so epsilon comes from bisection
  EXPECT_LT(e.epsilon, 25.0);
  EXPECT_LE(e.check.slope_condition, 100.0);
  EXPECT_GT(e.check.slope_condition, 99.0);
  EXPECT_EQ(e.N, 0);  // one interval I_0
  EXPECT_EQ(e.rows.size(), 1u);
}

TEST(Envelope, MovingTrajectoryStaysBelowWithinDelta) {
  std::vector<TimedProfile> tr;
  for (int s = 0; s <= 40; ++s) {
    const double t = 0.025 * s;
    tr.push_back({t, Profile::sample(
                         [t](double x) { return 0.63 + 0.5 * std::cos(2 * kPi * (x - 0.1 * t)); }, 64, 1.0)});
  }
  for (double delta : {0.2, 0.1, 0.05}) {
    const LowerEnvelope e = build_lower_envelope(tr, delta);
    EXPECT_EQ(e.check.below_violations, 0) << delta;
    EXPECT_EQ(e.check.gap_violations, 0) << delta;
    EXPECT_LE(e.check.max_gap, delta);
    for (const auto& row : e.rows)
      for (double v : row.h.h) EXPECT_GE(v, 0.0);
  }
}

TEST(Envelope, InputValidation) {
  EXPECT_THROW(build_lower_envelope({}, 0.1), ConfigError);
  std::vector<TimedProfile> tr = {{0.0, cos_dip(8)}, {0.0, cos_dip(8)}};
  EXPECT_THROW(build_lower_envelope(tr, 0.1), ConfigError);
  tr[1].t = 1.0;
  EXPECT_THROW(build_lower_envelope(tr, -1.0), ConfigError);
  EXPECT_THROW(build_lower_envelope(tr, 0.1, 0.3), ConfigError);
}

TEST(ProfileCsv, RoundTripIsExact) {
  support::TempDir dir("profile");
  const Profile h = cos_dip(24);
  write_profile_csv(dir.path() / "h.csv", h);
  const Profile g = read_profile_csv(dir.path() / "h.csv", 1.0);
  EXPECT_EQ(g.h, h.h);
  EXPECT_EQ(g.dh, h.dh);
}
