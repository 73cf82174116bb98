#include "kdv/potential.hpp"

#include <array>
#include <cmath>
#include <string>

#include "kdv/errors.hpp"

namespace kdv {

namespace {

// Truncated Taylor series to third order (coefficients f^(k)/k!).
struct Taylor3 {
  std::array<double, 4> c{};

  static Taylor3 variable(double x0, double slope) { return {{x0, slope, 0.0, 0.0}}; }
  static Taylor3 constant(double v) { return {{v, 0.0, 0.0, 0.0}}; }

  friend Taylor3 operator+(Taylor3 a, const Taylor3& b) {
    for (int k = 0; k < 4; ++k) a.c[k] += b.c[k];
    return a;
  }
  friend Taylor3 operator-(Taylor3 a, const Taylor3& b) {
    for (int k = 0; k < 4; ++k) a.c[k] -= b.c[k];
    return a;
  }
  friend Taylor3 operator*(const Taylor3& a, const Taylor3& b) {
    Taylor3 r;
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
    return r;
  }
  friend Taylor3 operator/(const Taylor3& a, const Taylor3& b) {
    Taylor3 r;
    for (int k = 0; k < 4; ++k) {
      double s = a.c[k];
      for (int i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
      r.c[k] = s / b.c[0];
    }
    return r;
  }
  friend Taylor3 exp(const Taylor3& g) {
    Taylor3 e;
    e.c[0] = std::exp(g.c[0]);
    for (int k = 1; k < 4; ++k) {
      double s = 0.0;
      for (int i = 1; i <= k; ++i) s += i * g.c[i] * e.c[k - i];
      e.c[k] = s / k;
    }
    return e;
  }

  double derivative(int k) const {
    static constexpr std::array<double, 4> fact{1.0, 1.0, 2.0, 6.0};
    return c[k] * fact[k];
  }
};

struct Shape {
  double value, d1, d3;
};

Shape shape(const PotentialSpec& p, double X) {
  switch (p.family) {
    case PotentialFamily::zero:
      return {0.0, 0.0, 0.0};
    case PotentialFamily::constant:
      return {p.amplitude, 0.0, 0.0};
    case PotentialFamily::sinusoidal:
      return {p.amplitude * std::sin(X), p.amplitude * std::cos(X), -p.amplitude * std::cos(X)};
    case PotentialFamily::bump: {
      const double s0 = (X - p.center) / p.width;
      if (std::abs(s0) >= 1.0) return {0.0, 0.0, 0.0};
      const auto s = Taylor3::variable(s0, 1.0 / p.width);
      const auto q = Taylor3::constant(1.0) - s * s;
      const auto f = exp(Taylor3::constant(1.0) - Taylor3::constant(1.0) / q);
      return {p.amplitude * f.derivative(0), p.amplitude * f.derivative(1),
              p.amplitude * f.derivative(3)};
    }
  }
  return {0.0, 0.0, 0.0};
}

}  // namespace

std::string_view to_string(PotentialFamily f) {
  switch (f) {
    case PotentialFamily::zero: return "zero";
    case PotentialFamily::constant: return "constant";
    case PotentialFamily::sinusoidal: return "sinusoidal";
    case PotentialFamily::bump: return "bump";
  }
  return "zero";
}

PotentialFamily parse_potential_family(std::string_view s) {
  if (s == "zero") return PotentialFamily::zero;
  if (s == "constant") return PotentialFamily::constant;
  if (s == "sinusoidal" || s == "sin") return PotentialFamily::sinusoidal;
  if (s == "bump") return PotentialFamily::bump;
  throw ValidationError("unknown potential family '" + std::string(s) + "'");
}

void PotentialSpec::validate() const {
  if (!(h > 0.0 && h <= 1.0)) throw ValidationError("potential h must lie in (0, 1]");
  if (!std::isfinite(amplitude)) throw ValidationError("potential amplitude must be finite");
  if (family == PotentialFamily::bump && !(width > 0.0))
    throw ValidationError("bump width must be positive");
  if (time_dependent && !(std::isfinite(envelope_amplitude) && std::isfinite(envelope_frequency)))
    throw ValidationError("time envelope parameters must be finite");
}

PotentialValue PotentialSpec::slow(double X, double T) const {
  const Shape s = shape(*this, X);
  double g = 1.0;
  double gt = 0.0;
  if (time_dependent) {
    g = 1.0 + envelope_amplitude * std::sin(envelope_frequency * T);
    gt = envelope_amplitude * envelope_frequency * std::cos(envelope_frequency * T);
  }
  return {g * s.value, g * s.d1, g * s.d3, gt * s.value};
}

PotentialValue PotentialSpec::physical(double x, double t) const {
  const auto b = slow(h * x, h * t);
  return {b.value, h * b.d1, h * h * h * b.d3, h * b.dt};
}

PotentialValue PotentialSpec::rescaled(double X, double S) const {
  const double ih2 = 1.0 / (h * h);
  const auto b = slow(X, S * ih2);
  return {ih2 * b.value, ih2 * b.d1, ih2 * b.d3, ih2 * ih2 * b.dt};
}

}  // namespace kdv
