#include "beamfsi/spectral.hpp"

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

namespace beamfsi {

void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

}  // namespace beamfsi

namespace beamfsi::spectral {

double wavenumber(int bin, int n, double L) {
  const int k = bin <= n / 2 ? bin : bin - n;
  return 2.0 * std::numbers::pi * k / L;
}

Spectrum coefficients(const Vec& f) {
  Eigen::FFT<double> fft;
  Spectrum c;
  fft.fwd(c, f);
  const double inv = 1.0 / static_cast<double>(f.size());
  for (auto& v : c) v *= inv;
  return c;
}

Vec synthesize(const Spectrum& c) {
  Eigen::FFT<double> fft;
  Spectrum scaled(c);
  const double n = static_cast<double>(c.size());
  for (auto& v : scaled) v *= n;
  Spectrum out;
  fft.inv(out, scaled);
  Vec f(c.size());
  for (size_t i = 0; i < c.size(); ++i) f[i] = out[i].real();
  return f;
}

Vec apply_symbol(const Vec& f, double L, const std::function<double(double)>& sigma) {
  const int n = static_cast<int>(f.size());
  Spectrum c = coefficients(f);
  for (int k = 0; k < n; ++k) c[k] *= sigma(wavenumber(k, n, L));
  return synthesize(c);
}

double symbol_norm_sq(const Vec& f, double L, const std::function<double(double)>& sigma) {
  const int n = static_cast<int>(f.size());
  const Spectrum c = coefficients(f);
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += sigma(wavenumber(k, n, L)) * std::norm(c[k]);
  return L * s;
}

Vec circulant_column(int n, double L, const std::function<double(double)>& sigma) {
  Vec col(n, 0.0);
  for (int m = 0; m < n; ++m) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      s += sigma(wavenumber(k, n, L)) * std::cos(2.0 * std::numbers::pi * k * m / n);
    }
    col[m] = s / n;
  }
  return col;
}

Vec derivative(const Vec& f, double L, int order) {
  const int n = static_cast<int>(f.size());
  Spectrum c = coefficients(f);
  const std::complex<double> I(0.0, 1.0);
  for (int k = 0; k < n; ++k) {
    double kk = wavenumber(k, n, L);
    // odd derivatives of the Nyquist mode are not representable
    if (n % 2 == 0 && k == n / 2 && order % 2 == 1) kk = 0.0;
    c[k] *= std::pow(I * kk, order);
  }
  return synthesize(c);
}

double mean(const Vec& f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s / static_cast<double>(f.size());
}

double h2_norm(const Vec& f, double L) {
  return std::sqrt(symbol_norm_sq(f, L, [](double k) {
    const double k2 = k * k;
    return 1.0 + k2 + k2 * k2;
  }));
}

}  // namespace beamfsi::spectral
