#pragma once

#include <array>
#include <limits>
#include <vector>

#include "kdv/potential.hpp"

namespace kdv::ode {

/// Slow-time soliton parameters: position A, scale C > 0 at time tau.
struct ODEState {
  double A = 0.0;
  double C = 1.0;
  double tau = 0.0;
};

struct Derivative {
  double dA = 0.0;
  double dC = 0.0;
};

/// dA/dtau = 4 C^2 - b0(A, tau),  dC/dtau = (1/3) C d_A b0(A, tau).
Derivative ode_rhs(const ODEState& s, const PotentialSpec& b0);

/// G = C^3 b0(A) - (12/5) C^5, constant along solutions when b0 is time independent.
double conserved_quantity(const ODEState& s, const PotentialSpec& b0);

enum class ExitEdge { none, lower, upper };

/// Dense solution of the effective system, stopped at min(tau_max, T*).
class ODETrajectory {
 public:
  struct Sample {
    double tau, A, C;
  };

  const std::vector<Sample>& samples() const { return samples_; }
  /// Exit time from delta <= C <= 1/delta; +inf when the band is never left.
  double T_star() const { return T_star_; }
  ExitEdge exit_edge() const { return edge_; }
  double delta() const { return delta_; }
  double tau_begin() const { return samples_.front().tau; }
  double tau_end() const { return samples_.back().tau; }
  std::size_t accepted_steps() const { return steps_.size(); }
  std::size_t rejected_steps() const { return rejected_; }

  /// Dense-output evaluation anywhere within [tau_begin, tau_end].
  ODEState at(double tau) const;
  /// Uniform resampling with n + 1 points spanning the trajectory.
  std::vector<Sample> resample(std::size_t n) const;

 private:
  friend ODETrajectory integrate(const ODEState&, const PotentialSpec&, double, double, double);

  // Continuous extension of one accepted step (quartic in theta).
  struct DenseStep {
    double tau0, h;
    std::array<std::array<double, 2>, 5> r;
    std::array<double, 2> eval(double tau) const;
  };

  std::vector<Sample> samples_;
  std::vector<DenseStep> steps_;
  double T_star_ = std::numeric_limits<double>::infinity();
  ExitEdge edge_ = ExitEdge::none;
  double delta_ = 0.25;
  std::size_t rejected_ = 0;
};

/// Adaptive Dormand-Prince 5(4) integration with PI step control and dense
/// output. Integrates backward when tau_max < init.tau. Band exits are
/// located by bisection on the dense output to 1e-12 in tau.
/// Throws ValidationError for C0 outside [delta, 1/delta] or tol <= 0, and
/// NumericalError on step-size underflow.
ODETrajectory integrate(const ODEState& init, const PotentialSpec& b0, double delta, double tau_max,
                        double tol);

/// Physical-frame reference trajectory t = tau / h, a = A / h, c = C.
struct PhysicalSample {
  double t, a, c;
};
std::vector<PhysicalSample> physical_trajectory(const ODETrajectory& traj, double h);

}  // namespace kdv::ode
