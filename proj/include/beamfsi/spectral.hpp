/// @file spectral.hpp
/// Periodic Fourier helpers on a uniform grid of n nodes over (0, L).
#pragma once

#include <complex>
#include <functional>

#include "beamfsi/common.hpp"

namespace beamfsi::spectral {

using Spectrum = std::vector<std::complex<double>>;

/// Signed angular wavenumber 2*pi*k/L of FFT bin k (Nyquist bin taken positive).
double wavenumber(int bin, int n, double L);

/// Normalized coefficients c_k = (1/n) sum_j f_j exp(-i k' x_j).
Spectrum coefficients(const Vec& f);
Vec synthesize(const Spectrum& c);

/// Applies a real even multiplier sigma(k') to f.
Vec apply_symbol(const Vec& f, double L, const std::function<double(double)>& sigma);

/// L * sum_k sigma(k') |c_k|^2.
double symbol_norm_sq(const Vec& f, double L, const std::function<double(double)>& sigma);

/// First column of the nodal circulant matrix of a real even multiplier.
Vec circulant_column(int n, double L, const std::function<double(double)>& sigma);

Vec derivative(const Vec& f, double L, int order = 1);

double mean(const Vec& f);

/// sqrt(||f||^2 + ||f'||^2 + ||f''||^2), spectral.
double h2_norm(const Vec& f, double L);

}  // namespace beamfsi::spectral
