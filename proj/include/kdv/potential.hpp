#pragma once

#include <string>
#include <string_view>

namespace kdv {

enum class PotentialFamily { zero, constant, sinusoidal, bump };

std::string_view to_string(PotentialFamily f);
PotentialFamily parse_potential_family(std::string_view s);

/// Value of a potential and the derivatives the solver and diagnostics need.
struct PotentialValue {
  double value = 0.0;
  double d1 = 0.0;  // first spatial derivative
  double d3 = 0.0;  // third spatial derivative
  double dt = 0.0;  // time derivative
};

/// Slowly varying potential b(x, t) = b0(h x, h t).
///
/// The profile b0(X, T) = envelope(T) * shape(X) where shape is one of
///   zero        0
///   constant    amplitude
///   sinusoidal  amplitude * sin(X)
///   bump        amplitude * exp(1 - 1/(1 - ((X - center)/width)^2)),  |X - center| < width
/// and envelope(T) = 1 + envelope_amplitude * sin(envelope_frequency * T)
/// (identically 1 unless time_dependent is set).
struct PotentialSpec {
  PotentialFamily family = PotentialFamily::zero;
  double amplitude = 0.0;
  double h = 1.0;
  double width = 1.0;
  double center = 0.0;
  bool time_dependent = false;
  double envelope_amplitude = 0.0;
  double envelope_frequency = 0.0;

  static PotentialSpec zero(double h = 1.0) { return {PotentialFamily::zero, 0.0, h}; }
  static PotentialSpec constant(double k, double h = 1.0) { return {PotentialFamily::constant, k, h}; }
  static PotentialSpec sinusoidal(double amp, double h = 1.0) {
    return {PotentialFamily::sinusoidal, amp, h};
  }
  static PotentialSpec bump(double amp, double width, double center = 0.0, double h = 1.0) {
    return {PotentialFamily::bump, amp, h, width, center};
  }

  void validate() const;

  /// b0 and its X/T derivatives at slow variables (X, T).
  PotentialValue slow(double X, double T = 0.0) const;
  /// b(x, t) = b0(h x, h t) with chain-rule derivatives.
  PotentialValue physical(double x, double t = 0.0) const;
  /// B(X, S) = h^-2 b0(X, S / h^2), the potential of the rescaled equation.
  PotentialValue rescaled(double X, double S = 0.0) const;

  bool is_zero() const { return family == PotentialFamily::zero || amplitude == 0.0; }
  bool is_time_independent() const { return !time_dependent || envelope_amplitude == 0.0; }
};

}  // namespace kdv
