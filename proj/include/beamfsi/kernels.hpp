/// @file kernels.hpp
/// Hot loops in two flavours: a serial reference and an OpenMP version.
/// Both must agree to round-off; the benchmark target compares their speed.
#pragma once

#include "beamfsi/common.hpp"

namespace beamfsi::kernels {

enum class Backend { Serial, OpenMP };

/// Values stored level-major: f[lev * ncols + col].
struct LevelGrid {
  const double* data;
  int ncols;
  int nlev;
};

/// Column-uniform source levels y_j = y0 + j*dy.
struct Levels {
  double y0;
  double dy;
};

/// sum_cols sum_{j != j'} |f_j - f_j'|^2 / |y_j - y_j'|^(1+2s)
double gagliardo_y_sum(LevelGrid f, Levels lv, double s, Backend b = Backend::OpenMP);

/// sum_i w_i |f_i|^p
double power_sum(const Vec& f, const Vec& w, int p, Backend b = Backend::OpenMP);

/// max over sample pairs a<b of (max|h_b-h_a| + max|dh_b-dh_a|) / (t_b-t_a)^theta
double hoelder_pair_max(const std::vector<Vec>& h, const std::vector<Vec>& dh, const Vec& t,
                        double theta, Backend b = Backend::OpenMP);

/// Cubic Lagrange resampling of every column at target heights.
/// targets[k * ncols + col]; samples outside the source range take the end value.
Vec resample_columns(LevelGrid src, Levels lv, const Vec& targets, int ntarget_levels,
                     Backend b = Backend::OpenMP);

/// Single-point cubic interpolation used by the resampler.
double cubic_at(const double* col, int stride, int nlev, Levels lv, double y);

}  // namespace beamfsi::kernels
