// Manufactured solutions on a static channel y in (0, h(x)).
#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "beamfsi/solver.hpp"

namespace beamfsi::support {

/// Forward-mode dual number; nesting gives higher derivatives.
template <class T>
struct Dual {
  T v{};
  T d{};
};

template <class T> Dual<T> operator+(Dual<T> a, Dual<T> b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(Dual<T> a, Dual<T> b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(Dual<T> a, Dual<T> b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T> Dual<T> operator/(Dual<T> a, Dual<T> b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
template <class T> Dual<T> operator+(Dual<T> a, double c) { return {a.v + c, a.d}; }
template <class T> Dual<T> operator+(double c, Dual<T> a) { return {a.v + c, a.d}; }
template <class T> Dual<T> operator-(double c, Dual<T> a) { return {c - a.v, T{} - a.d}; }
template <class T> Dual<T> operator*(double c, Dual<T> a) { return {c * a.v, c * a.d}; }
template <class T> Dual<T> sin(Dual<T> a) {
  using std::cos, std::sin;
  return {sin(a.v), a.d * cos(a.v)};
}
template <class T> Dual<T> cos(Dual<T> a) {
  using std::cos, std::sin;
  return {cos(a.v), T{} - a.d * sin(a.v)};
}

/// psi = g(x) s^2 (1 - s)^2 with s = y / h(x): no-slip on both walls.
/// Velocity u = (-psi_y, psi_x), pressure p = P cos(2 pi x) (y - 1/2).
struct ChannelMMS {
  double L = 1.0;
  double h_amp = 0.2;
  double g_amp = 1.0;
  double p_amp = 0.5;

  template <class T>
  T h(T x) const {
    using std::sin;
    const double k = 2.0 * std::numbers::pi / L;
    return 1.0 + h_amp * sin(k * x);
  }
  template <class T>
  T psi(T x, T y) const {
    using std::cos;
    const double k = 2.0 * std::numbers::pi / L;
    const T g = g_amp * (1.0 + 0.5 * cos(k * x));
    const T s = y / h(x);
    const T q = s * (1.0 - s);
    return g * q * q;
  }
  double height(double x) const { return h(x); }

  /// d^(a+b) psi / dx^a dy^b for a + b <= 3.
  double dpsi(int a, int b, double x, double y) const;
  double u1(double x, double y) const { return -dpsi(0, 1, x, y); }
  double u2(double x, double y) const { return dpsi(1, 0, x, y); }
  double pressure(double x, double y) const;
  /// Body force making (u, p) a steady solution of
  /// rho (u . grad) u - mu lap u + grad p = f.
  std::array<double, 2> force(double x, double y, double rho, double mu) const;

  /// Node heights of the channel on an nx grid.
  Vec node_heights(int nx) const;
  /// Exact samples at the solver dofs of the discrete geometry.
  FluidState sample(const FluidGrid& g) const;
  Vec force_samples(const FluidGrid& g, double rho, double mu) const;
  /// Discretely solenoidal state from corner samples of psi.
  FluidState solenoidal(const FluidGrid& g) const;
};

struct MmsResult {
  double l2_error = 0.0;
  double l2_norm = 0.0;
};

/// One fluid step from the exact samples with a huge dt: the steady discrete
/// problem with the advecting field frozen at the exact velocity.
MmsResult mms_steady_error(const ChannelMMS& m, int nx, int nz, const Params& p);

/// Volume-weighted L2 norm of a velocity vector.
double velocity_l2(const FluidGrid& g, const Vec& h, const Vec& u);

}  // namespace beamfsi::support
