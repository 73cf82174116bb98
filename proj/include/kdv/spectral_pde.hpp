#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kdv/grid.hpp"
#include "kdv/potential.hpp"

namespace kdv::spectral {

/// Time stepping controls for the rescaled equation
///   dV/dS = d/dX (-V_XX - 3 V^2 + B V).
struct StepperConfig {
  double dt = 1e-5;
  bool dealias = true;
  int contour_points = 32;
  int snapshot_stride = 1;
  double blowup_guard = 1e8;

  void validate() const;
};

/// Fourier symbol i k^3 of -d^3/dX^3 on the half spectrum (Nyquist set to 0).
std::vector<cplx> linear_symbol(const GridSpec& g);

/// d/dX (-3 V^2 + B V) evaluated spectrally; the quadratic product uses the
/// two-thirds rule when dealias is set. Throws NumericalError on NaN/Inf input.
std::vector<double> nonlinear_term(const FieldState& v, std::span<const double> B, bool dealias = true);

/// Per-mode ETDRK4 tables for a diagonal linear operator with symbol L:
///   E = exp(L dt), E2 = exp(L dt / 2), Q = dt phi1(L dt / 2) / 2,
///   f1 = dt (phi1 - 3 phi2 + 4 phi3), f2 = dt (phi2 - 2 phi3), f3 = dt (4 phi3 - phi2),
/// all phi-combinations evaluated as means over M points on the unit circle
/// centered at L dt.
struct EtdCoefficients {
  double dt = 0.0;
  std::vector<cplx> E, E2, Q, f1, f2, f3;
};
EtdCoefficients etdrk4_coefficients(std::span<const cplx> symbol, double dt, int contour_points);

/// Single-threaded ETDRK4 integrator with precomputed tables. The potential
/// term B V is part of the explicit (forced) part.
class Stepper {
 public:
  /// Fixed potential samples B(X).
  Stepper(const GridSpec& g, const StepperConfig& cfg, std::vector<double> B);
  /// Rescaled-frame potential B(X, S) = h^-2 b0(X, S/h^2); resampled per
  /// stage only when time dependent.
  Stepper(const GridSpec& g, const StepperConfig& cfg, const PotentialSpec& potential);

  FieldState step(const FieldState& v) const;

  const GridSpec& grid() const { return grid_; }
  const StepperConfig& config() const { return cfg_; }
  const EtdCoefficients& coefficients() const { return coef_; }
  /// Potential samples at rescaled time S.
  std::vector<double> potential_at(double S) const;

 private:
  std::vector<cplx> forcing_hat(std::span<const cplx> vhat, double S) const;

  GridSpec grid_;
  StepperConfig cfg_;
  EtdCoefficients coef_;
  std::vector<double> B_;
  std::optional<PotentialSpec> time_dependent_;
};

/// One ETDRK4 step; builds the tables for (grid, dt) on each call.
FieldState step(const FieldState& v, const StepperConfig& cfg, std::span<const double> B);

/// Stable default time step for a field/potential pair: the smaller of a
/// dispersive bound 0.1 dx^3 * guard and an advective bound 0.2 dx / max|6V - B|.
double default_dt(const GridSpec& g, std::span<const double> V0, std::span<const double> B,
                  double guard = 10.0);

using Observer = std::function<void(const FieldState&)>;

struct SimulationResult {
  std::vector<FieldState> snapshots;
  std::size_t steps = 0;
  double dt = 0.0;  // step actually used (S_end divided into whole steps)
};

/// Advance to S_end, emitting a snapshot (and calling every observer) at
/// S = initial.time and every snapshot_stride steps, plus the final state.
SimulationResult simulate(const FieldState& initial, const PotentialSpec& potential,
                          const StepperConfig& cfg, double S_end,
                          std::span<const Observer> observers = {});

}  // namespace kdv::spectral
