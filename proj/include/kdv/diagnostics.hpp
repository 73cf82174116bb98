#pragma once

#include <array>
#include <span>
#include <vector>

#include "kdv/grid.hpp"
#include "kdv/potential.hpp"
#include "kdv/soliton.hpp"

namespace kdv::diag {

using soliton::SolitonParams;

// ---------------------------------------------------------------------------
// Virial weight

/// Cutoff profile: even, 1 on [0, 1], exp(-|x|) beyond 1.5, with a C^2
/// log-space quintic blend in between. Satisfies exp(-x) <= Phi <= 3 exp(-x).
double virial_phi(double x);
double virial_phi_derivative(double x);
/// Psi(x) = integral_0^x Phi.
double virial_Psi(double x);
/// Psi(+inf) = integral_0^inf Phi.
double virial_Psi_limit();

/// psi(x) = A Psi(x / A) and Phi tabulated on a grid around center a.
struct VirialWeight {
  double A_scale = 10.0;
  double center = 0.0;
  std::vector<double> phi;  // Phi((x - a) / A)
  std::vector<double> psi;  // A Psi((x - a) / A)

  static VirialWeight tabulate(const GridSpec& g, double a, double A_scale = 10.0);
  double psi_bound() const { return A_scale * virial_Psi_limit(); }
};

// ---------------------------------------------------------------------------
// Norms and functionals

double h1_norm(const FieldState& v);
/// H^1 norm with weight exp(-eps |x - a|), |x - a| the periodic distance.
double weighted_h1(const FieldState& v, double a, double eps);

/// E(v) = 1/2 <K v, v> - integral v^3 with K = 4c^2 - d_x^2 - 6 eta.
double energy_functional(const FieldState& v, const SolitonParams& p);

/// integral psi(x - a) v^2.
double virial_quantity(const FieldState& v, const VirialWeight& w);

/// d_x^-1 on the periodic grid (zero mode set to 0). Throws ValidationError
/// unless |mean f| < 1e-10 * RMS(f).
FieldState partial_x_inverse(const FieldState& f);
/// omega(u, v) = <u, d_x^-1 v>.
double symplectic_form(const FieldState& u, const FieldState& v);

// ---------------------------------------------------------------------------
// Parameter equations

struct FitSample {
  double t = 0.0;
  double a = 0.0;
  double c = 0.0;
};

struct ParameterResidual {
  double t = 0.0;
  double a_dot = 0.0;
  double c_dot = 0.0;
  double res_a = 0.0;  // a' - 4c^2 + b(a)
  double res_c = 0.0;  // c' - (1/3) c b'(a)
};

/// Time derivative of uniformly sampled data: fourth-order centered stencils
/// in the interior, second-order centered next to the ends, second-order
/// one-sided at the ends. Needs at least 3 samples.
std::vector<double> finite_difference(std::span<const double> y, double dt);

/// Residuals of the parameter equations along a physical-frame trajectory.
/// Throws ValidationError for fewer than 3 samples or non-uniform times.
std::vector<ParameterResidual> parameter_residuals(std::span<const FitSample> traj,
                                                   const PotentialSpec& b);

// ---------------------------------------------------------------------------
// Conservation laws

struct ConservationResidual {
  double t = 0.0;
  double P = 0.0;
  double H = 0.0;
  double dP_dt = 0.0;
  double P_law = 0.0;   // integral b_x u^2
  double dH_dt = 0.0;
  double H_law = 0.0;   // 1/2 integral b_t u^2
  double P_residual = 0.0;
  double H_residual = 0.0;
};

enum class Frame { physical, rescaled };

/// dP/dt - integral b_x u^2 and dH/dt - 1/2 integral b_t u^2 along uniformly
/// spaced snapshots. In the rescaled frame b is replaced by B(X, S).
std::vector<ConservationResidual> conservation_residuals(std::span<const FieldState> snapshots,
                                                         const PotentialSpec& b,
                                                         Frame frame = Frame::physical);

// ---------------------------------------------------------------------------
// Forcing decomposition

struct ForcingDecomposition {
  double perp_deviation = 0.0;   // ||F_perp - (F_perp)_0||_L2
  double alpha = 0.0;            // F_par = alpha d_a eta + beta d_c eta
  double beta = 0.0;
  double omega_a = 0.0;          // <F_perp, d_x^-1 d_a eta>
  double omega_c = 0.0;          // <F_perp, d_x^-1 d_c eta>
  double f0_norm = 0.0;          // ||F_0||_L2
  double leading_moment = 0.0;   // <(F_perp)_0, (x-a) eta>
  double leading_omega_a = 0.0;  // <(F_perp)_0, d_x^-1 d_a eta>
};

/// Evaluates F_0 = -(a' - 4c^2) d_a eta - c' d_c eta + d_x(b eta) on a grid
/// around a, splits it symplectically against span{d_a eta, d_c eta}, and
/// compares the orthogonal part with the leading-order profile.
ForcingDecomposition forcing_decomposition_residual(const SolitonParams& p, double a_dot,
                                                    double c_dot, const PotentialSpec& b,
                                                    double t = 0.0, std::size_t N = 2048);

// ---------------------------------------------------------------------------
// Per-snapshot record

struct DiagnosticsRecord {
  double time = 0.0;
  double P = 0.0;
  double H = 0.0;
  double a = 0.0;
  double c = 0.0;
  double h1_norm_v = 0.0;
  double weighted_h1_v = 0.0;
  double orth1 = 0.0;
  double orth2 = 0.0;
  double energy_E = 0.0;
  double virial_psi_v2 = 0.0;
  double res_a = 0.0;
  double res_c = 0.0;
  double momentum_law_residual = 0.0;
};

struct DiagnosticsOptions {
  double eps = 0.0;       // <= 0 selects 0.5 min(c, 1)
  double A_scale = 10.0;
};

/// Fills every snapshot-local column; res_a, res_c and the momentum-law
/// residual need the whole series and are filled by complete_records.
DiagnosticsRecord snapshot_record(const FieldState& u, const SolitonParams& p, const FieldState& v,
                                  std::array<double, 2> orth, const PotentialSpec& b,
                                  const DiagnosticsOptions& opt = {});

void complete_records(std::vector<DiagnosticsRecord>& records, std::span<const FieldState> snapshots,
                      const PotentialSpec& b);

}  // namespace kdv::diag
