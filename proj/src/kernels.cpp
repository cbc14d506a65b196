#include "beamfsi/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace beamfsi::kernels {

namespace {

double gagliardo_column(LevelGrid f, Levels lv, double s, int col) {
  double acc = 0.0;
  const double expo = 1.0 + 2.0 * s;
  for (int j = 0; j < f.nlev; ++j) {
    const double fj = f.data[j * f.ncols + col];
    for (int jp = j + 1; jp < f.nlev; ++jp) {
      const double diff = fj - f.data[jp * f.ncols + col];
      acc += diff * diff / std::pow((jp - j) * lv.dy, expo);
    }
  }
  return 2.0 * acc;
}

double hoelder_pair(const std::vector<Vec>& h, const std::vector<Vec>& dh, const Vec& t,
                    double theta, size_t a, size_t b) {
  double dv = 0.0;
  double ds = 0.0;
  for (size_t i = 0; i < h[a].size(); ++i) {
    dv = std::max(dv, std::abs(h[b][i] - h[a][i]));
    ds = std::max(ds, std::abs(dh[b][i] - dh[a][i]));
  }
  const double gap = t[b] - t[a];
  if (gap <= 0.0) return 0.0;
  return (dv + ds) / std::pow(gap, theta);
}

}  // namespace

double cubic_at(const double* col, int stride, int nlev, Levels lv, double y) {
  const double last = lv.y0 + (nlev - 1) * lv.dy;
  if (y <= lv.y0) return col[0];
  if (y >= last) return col[(nlev - 1) * stride];
  const double u = (y - lv.y0) / lv.dy;
  int j = static_cast<int>(std::floor(u));
  j = std::clamp(j, 0, nlev - 2);
  const double r = u - j;
  if (r == 0.0) return col[j * stride];
  if (nlev < 4) return (1.0 - r) * col[j * stride] + r * col[(j + 1) * stride];
  const int base = std::clamp(j - 1, 0, nlev - 4);
  const double x = u - base;
  double out = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int c = 0; c < 4; ++c) {
      if (c != a) w *= (x - c) / static_cast<double>(a - c);
    }
    out += w * col[(base + a) * stride];
  }
  return out;
}

double gagliardo_y_sum(LevelGrid f, Levels lv, double s, Backend b) {
  double total = 0.0;
  if (b == Backend::Serial) {
    for (int c = 0; c < f.ncols; ++c) total += gagliardo_column(f, lv, s, c);
    return total;
  }
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (int c = 0; c < f.ncols; ++c) total += gagliardo_column(f, lv, s, c);
  return total;
}

double power_sum(const Vec& f, const Vec& w, int p, Backend b) {
  const long n = static_cast<long>(f.size());
  double total = 0.0;
  if (b == Backend::Serial) {
    for (long i = 0; i < n; ++i) total += w[i] * std::pow(std::abs(f[i]), p);
    return total;
  }
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (long i = 0; i < n; ++i) total += w[i] * std::pow(std::abs(f[i]), p);
  return total;
}

double hoelder_pair_max(const std::vector<Vec>& h, const std::vector<Vec>& dh, const Vec& t,
                        double theta, Backend b) {
  const long n = static_cast<long>(h.size());
  double best = 0.0;
  if (b == Backend::Serial) {
    for (long a = 0; a < n; ++a)
      for (long c = a + 1; c < n; ++c) best = std::max(best, hoelder_pair(h, dh, t, theta, a, c));
    return best;
  }
#pragma omp parallel for reduction(max : best) schedule(dynamic, 4)
  for (long a = 0; a < n; ++a)
    for (long c = a + 1; c < n; ++c) best = std::max(best, hoelder_pair(h, dh, t, theta, a, c));
  return best;
}

Vec resample_columns(LevelGrid src, Levels lv, const Vec& targets, int ntarget_levels,
                     Backend b) {
  Vec out(static_cast<size_t>(ntarget_levels) * src.ncols);
  const int nc = src.ncols;
  auto body = [&](int k) {
    for (int c = 0; c < nc; ++c) {
      out[k * nc + c] = cubic_at(src.data + c, nc, src.nlev, lv, targets[k * nc + c]);
    }
  };
  if (b == Backend::Serial) {
    for (int k = 0; k < ntarget_levels; ++k) body(k);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (int k = 0; k < ntarget_levels; ++k) body(k);
  return out;
}

}  // namespace beamfsi::kernels
