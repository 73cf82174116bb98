#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kdv/diagnostics.hpp"
#include "kdv/effective_ode.hpp"
#include "kdv/fitting.hpp"
#include "kdv/harness/config.hpp"
#include "kdv/operator_lab.hpp"
#include "kdv/spectral_pde.hpp"

namespace kdv::harness {

/// Rescaled field V(X, S) to the physical frame u(x, t) = h^2 V(h x, h^3 t).
FieldState to_physical(const FieldState& V, double h);

/// One fitted snapshot. Rescaled quantities carry a tilde; A_h = A~ and
/// C_h = h C~ share the slow-variable scale of the ODE.
struct FitRow {
  double S = 0.0;
  double T = 0.0;
  double A_tilde = 0.0;
  double C_tilde = 0.0;
  double A_h = 0.0;
  double C_h = 0.0;
  double a_refit = 0.0;  // physical frame
  double c_refit = 0.0;
  double orth1 = 0.0;
  double orth2 = 0.0;
  int refit_iters = 0;
};

struct SimulationArtifacts {
  RunConfig config;
  spectral::SimulationResult sim;
  std::vector<FitRow> fits;
  std::vector<diag::DiagnosticsRecord> diagnostics;  // physical frame
};

/// PDE run plus per-snapshot peak fit, orthogonality refit and diagnostics.
SimulationArtifacts run_simulation(const RunConfig& cfg);

struct CompareRow {
  double T = 0.0;
  double A_h = 0.0;
  double A = 0.0;
  double C_h = 0.0;
  double C = 0.0;
  double A_refit = 0.0;  // h a_refit
  double C_refit = 0.0;
};

/// Sup over the compared window and terminal values of the frame-matched
/// differences, plus residual-norm proxies of v in the physical frame.
struct CompareSummary {
  double h = 0.0;
  double sup_A = 0.0;
  double sup_C = 0.0;
  double sup_A_refit = 0.0;
  double sup_C_refit = 0.0;
  double terminal_A = 0.0;
  double terminal_C = 0.0;
  double sup_v_h1 = 0.0;
  double terminal_v_h1 = 0.0;
  double sup_v_weighted = 0.0;
  double max_orth = 0.0;
  double T_end = 0.0;
  double T_star = 0.0;  // +inf when the band is never left
  std::size_t rows = 0;
};

struct CompareResult {
  SimulationArtifacts run;
  std::optional<ode::ODETrajectory> ode;  // empty when the horizon is 0
  std::vector<CompareRow> rows;
  CompareSummary summary;
};

/// PDE against the effective ODE over T in [0, min(K, T*)].
CompareResult run_compare(const RunConfig& cfg);

/// Least-squares line through (log x, log y) with a 95% Student-t interval
/// on the slope. Needs n >= 3 and positive data.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
};
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct ConvergenceEntry {
  double h = 0.0;
  bool ok = false;
  std::string error;
  CompareSummary summary;
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;
  SlopeFit scale_error;        // sup |C_h - C|, peak fit
  SlopeFit position_error;     // sup |A_h - A|, peak fit
  SlopeFit refit_scale_error;  // sup |C_refit - C|
  SlopeFit residual_norm;      // sup ||v||_H1, physical frame
  bool slopes_valid = false;   // at least 3 runs survived
};

/// One compare per h (concurrently when parallel is set); failed runs are
/// recorded and slopes are fitted on the survivors.
ConvergenceReport run_converge(const RunConfig& base, bool parallel = true);

struct SpectrumCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SpectrumReport {
  std::size_t N = 0;
  double L = 0.0;
  std::vector<double> eigenvalues;  // lowest few, ascending
  double continuum_edge = 0.0;      // lowest eigenvalue above 3.9
  bool edge_degraded = false;       // edge < 4 - 1e-3 or edge > 4.01
  double bound_state_error = 0.0;   // max |lambda_k - {-5, 0, 3}|
  double f1_error = 0.0;            // sup |f1 - (sqrt15/4) sech^3|
  double f0_error = 0.0;            // sup |f0 + (sqrt15/8) theta'|
  std::vector<oplab::ConstantEntry> constants;
  double min_unconstrained = 0.0;
  double min_L2 = 0.0;
  double min_H1 = 0.0;
  double mm_min = 0.0;
  double mm_min_doubled = 0.0;
  double mm_unconstrained = 0.0;
  std::vector<SpectrumCheck> checks;
  bool all_pass() const;
};

/// Operator suite on the box [-L/2, L/2) with N points; the virial-form
/// minimum is repeated at 2N for the stability check.
SpectrumReport run_spectrum(std::size_t N = 512, double L = 40.0);

struct SnapshotFit {
  FieldState field;
  fit::PeakFit peak;
  fit::RefitResult refit;
};

/// Peak fit and orthogonality refit of a single snapshot, in its own frame.
SnapshotFit fit_snapshot(const FieldState& field, fit::PeakMethod method = fit::PeakMethod::quadratic,
                         double tol = 1e-10);

}  // namespace kdv::harness
