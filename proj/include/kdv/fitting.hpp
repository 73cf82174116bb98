#pragma once

#include <array>

#include "kdv/grid.hpp"
#include "kdv/soliton.hpp"

namespace kdv::fit {

using soliton::SolitonParams;

enum class PeakMethod { quadratic, fourier };

/// Peak fit: center at the refined maximum, scale sqrt(peak / 2).
struct PeakFit {
  double a_tilde = 0.0;
  double c_tilde = 0.0;
  double peak_value = 0.0;

  SolitonParams params() const { return {a_tilde, c_tilde}; }
};

/// Grid argmax refined by a parabola through the three samples around it
/// (quadratic) or by Newton on the trigonometric interpolant (fourier).
/// Throws NumericalError when the maximum does not exceed four times the
/// RMS of the field away from the peak.
PeakFit peak_fit(const FieldState& field, PeakMethod method = PeakMethod::quadratic);

/// Weight standing in for (x - a) on a periodic grid: the periodic offset,
/// damped by the virial profile beyond a quarter of the domain.
double position_weight(const GridSpec& g, double offset);

struct RefitResult {
  SolitonParams params;
  FieldState v;  // u - eta(., a, c)
  int iters = 0;
  std::array<double, 2> residuals{};  // <v, eta>, <v, (x - a) eta>
};

/// Orthogonality functionals (<u - eta, eta>, <u - eta, (x - a) eta>) at p.
std::array<double, 2> orthogonality_residuals(const FieldState& u, const SolitonParams& p);

/// Minus the (a, c)-Jacobian of the orthogonality functionals, including the
/// v-dependent terms. At an exact soliton it is [[0, 8c^2], [(8/3)c^3, 0]].
std::array<std::array<double, 2>, 2> refit_jacobian(const FieldState& u, const SolitonParams& p);

/// Newton solve for (a, c) such that v = u - eta(., a, c) is orthogonal to
/// eta and (x - a) eta. Throws NumericalError after max_iters iterations.
RefitResult orthogonality_refit(const FieldState& u, const SolitonParams& seed, double tol = 1e-10,
                                int max_iters = 50);

}  // namespace kdv::fit
