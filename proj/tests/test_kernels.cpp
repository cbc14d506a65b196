#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "beamfsi/kernels.hpp"

using namespace beamfsi;
namespace kn = beamfsi::kernels;

namespace {
Vec random_vec(std::mt19937& rng, size_t n) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vec v(n);
  for (double& x : v) x = U(rng);
  return v;
}
}  // namespace

TEST(Kernels, GagliardoBackendsAgreeAndMatchBruteForce) {
  std::mt19937 rng(1);
  const int nc = 7, nl = 9;
  const Vec f = random_vec(rng, nc * nl);
  const kn::Levels lv{-1.0, 0.25};
  const double s = 0.3;
  double ref = 0.0;
  for (int c = 0; c < nc; ++c)
    for (int a = 0; a < nl; ++a)
      for (int b = 0; b < nl; ++b)
        if (a != b) {
          const double d = f[a * nc + c] - f[b * nc + c];
          ref += d * d / std::pow(std::abs(a - b) * lv.dy, 1 + 2 * s);
        }
  const kn::LevelGrid g{f.data(), nc, nl};
  const double serial = kn::gagliardo_y_sum(g, lv, s, kn::Backend::Serial);
  const double omp = kn::gagliardo_y_sum(g, lv, s, kn::Backend::OpenMP);
  EXPECT_NEAR(serial, ref, 1e-12 * ref);
  EXPECT_NEAR(omp, serial, 1e-12 * ref);
}

TEST(Kernels, PowerSum) {
  std::mt19937 rng(2);
  const Vec f = random_vec(rng, 1000), w = random_vec(rng, 1000);
  double ref = 0.0;
  for (size_t i = 0; i < f.size(); ++i) ref += w[i] * std::pow(std::abs(f[i]), 4);
  EXPECT_NEAR(kn::power_sum(f, w, 4, kn::Backend::Serial), ref, 1e-12);
  EXPECT_NEAR(kn::power_sum(f, w, 4, kn::Backend::OpenMP), ref, 1e-12);
}

TEST(Kernels, HoelderPairMaxBackendsAgree) {
  std::mt19937 rng(3);
  std::vector<Vec> h, dh;
  Vec t;
  for (int s = 0; s < 12; ++s) {
    h.push_back(random_vec(rng, 16));
    dh.push_back(random_vec(rng, 16));
    t.push_back(0.1 * s + 0.01 * s * s);
  }
  const double a = kn::hoelder_pair_max(h, dh, t, 0.2, kn::Backend::Serial);
  const double b = kn::hoelder_pair_max(h, dh, t, 0.2, kn::Backend::OpenMP);
  EXPECT_GT(a, 0.0);
  EXPECT_DOUBLE_EQ(a, b);
}

TEST(Kernels, CubicResamplingIsExactOnCubics) {
  const int nc = 3, nl = 10;
  const kn::Levels lv{0.0, 0.1};
  Vec f(nc * nl);
  auto poly = [](int c, double y) { return 1.0 + c * y - 2.0 * y * y + 0.5 * y * y * y; };
  for (int j = 0; j < nl; ++j)
    for (int c = 0; c < nc; ++c) f[j * nc + c] = poly(c, j * 0.1);
  const int nt = 5;
  Vec targets(nt * nc);
  for (int k = 0; k < nt; ++k)
    for (int c = 0; c < nc; ++c) targets[k * nc + c] = 0.05 + 0.17 * k + 0.01 * c;
  const kn::LevelGrid g{f.data(), nc, nl};
  const Vec a = kn::resample_columns(g, lv, targets, nt, kn::Backend::Serial);
  const Vec b = kn::resample_columns(g, lv, targets, nt, kn::Backend::OpenMP);
  for (int k = 0; k < nt; ++k)
    for (int c = 0; c < nc; ++c) {
      EXPECT_NEAR(a[k * nc + c], poly(c, targets[k * nc + c]), 1e-13);
      EXPECT_EQ(a[k * nc + c], b[k * nc + c]);
    }
  // outside the source range the end value is used
  Vec out = {-1.0, -1.0, -1.0, 5.0, 5.0, 5.0};
  const Vec e = kn::resample_columns(g, lv, out, 2);
  for (int c = 0; c < nc; ++c) {
    EXPECT_EQ(e[c], f[c]);
    EXPECT_EQ(e[nc + c], f[(nl - 1) * nc + c]);
  }
}
