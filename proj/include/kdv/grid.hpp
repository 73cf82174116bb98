#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kdv {

using cplx = std::complex<double>;

/// Uniform periodic grid on [origin, origin + L) with N points.
struct GridSpec {
  std::size_t N = 1024;
  double L = 1.0;
  double origin = 0.0;

  /// Throws ValidationError unless N >= 16 is a power of two and L > 0.
  void validate() const;

  double dx() const { return L / static_cast<double>(N); }
  double x(std::size_t j) const { return origin + static_cast<double>(j) * dx(); }
  std::vector<double> points() const;

  /// Number of non-negative half-spectrum modes (N/2 + 1).
  std::size_t modes() const { return N / 2 + 1; }
  /// Wavenumber 2*pi*j/L of half-spectrum index j.
  double wavenumber(std::size_t j) const;

  /// Periodic offset x - a folded into [-L/2, L/2).
  double offset(double x, double a) const;

  bool operator==(const GridSpec&) const = default;
};

/// Periodic samples of a real field at one time instant.
struct FieldState {
  GridSpec grid;
  std::vector<double> values;
  double time = 0.0;

  static FieldState zeros(const GridSpec& g, double t = 0.0) {
    return FieldState{g, std::vector<double>(g.N, 0.0), t};
  }
};

// Real-to-complex transforms over the half spectrum. Forward is unnormalized;
// inverse divides by N. Safe to call concurrently.
std::vector<cplx> rfft(std::span<const double> f);
std::vector<double> irfft(std::span<const cplx> fhat, std::size_t N);

/// Spectral derivative of the given order. The Nyquist mode is dropped for
/// odd orders so real fields stay real.
std::vector<double> spectral_derivative(const GridSpec& g, std::span<const double> f, int order = 1);

/// Periodic trapezoid rule: dx * sum(f).
double integrate(const GridSpec& g, std::span<const double> f);
double inner(const GridSpec& g, std::span<const double> f, std::span<const double> w);

/// Parseval: integral of f^2 evaluated from the half spectrum.
double fourier_l2_squared(const GridSpec& g, std::span<const double> f);

/// Zero every mode with |j| >= N/3 (two-thirds rule), in place.
void dealias(std::span<cplx> fhat);

}  // namespace kdv
