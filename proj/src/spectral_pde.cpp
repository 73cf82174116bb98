#include "kdv/spectral_pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kdv/errors.hpp"
#include "kdv/soliton.hpp"

namespace kdv::spectral {

namespace {

void check_finite(std::span<const double> v, const char* where) {
  for (double x : v)
    if (!std::isfinite(x)) throw NumericalError(std::string(where) + ": non-finite field value");
}

// i k on the half spectrum, Nyquist dropped.
std::vector<cplx> ik_table(const GridSpec& g) {
  std::vector<cplx> ik(g.modes());
  for (std::size_t j = 0; j < ik.size(); ++j) ik[j] = cplx(0.0, g.wavenumber(j));
  ik.back() = 0.0;
  return ik;
}

}  // namespace

void StepperConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("stepper dt must be positive");
  if (contour_points < 16 || contour_points % 2 != 0)
    throw ValidationError("contour_points must be an even integer >= 16");
  if (snapshot_stride < 1) throw ValidationError("snapshot_stride must be >= 1");
  if (!(blowup_guard > 0.0)) throw ValidationError("blowup_guard must be positive");
}

std::vector<cplx> linear_symbol(const GridSpec& g) {
  std::vector<cplx> sym(g.modes());
  for (std::size_t j = 0; j < sym.size(); ++j) {
    const double k = g.wavenumber(j);
    sym[j] = cplx(0.0, k * k * k);
  }
  sym.back() = 0.0;
  return sym;
}

std::vector<double> nonlinear_term(const FieldState& v, std::span<const double> B, bool dealias_on) {
  const auto& g = v.grid;
  if (B.size() != g.N || v.values.size() != g.N)
    throw ValidationError("nonlinear_term: size mismatch");
  check_finite(v.values, "nonlinear_term");
  auto vhat = rfft(v.values);
  if (dealias_on) dealias(vhat);
  const auto V = irfft(vhat, g.N);
  std::vector<double> w(g.N);
  for (std::size_t j = 0; j < g.N; ++j) w[j] = -3.0 * V[j] * V[j] + B[j] * V[j];
  auto what = rfft(w);
  if (dealias_on) dealias(what);
  const auto ik = ik_table(g);
  for (std::size_t j = 0; j < what.size(); ++j) what[j] *= ik[j];
  return irfft(what, g.N);
}

EtdCoefficients etdrk4_coefficients(std::span<const cplx> symbol, double dt, int M) {
  if (!(dt > 0.0)) throw ValidationError("etdrk4_coefficients: dt must be positive");
  if (M < 16 || M % 2 != 0) throw ValidationError("etdrk4_coefficients: M must be even and >= 16");
  EtdCoefficients c;
  c.dt = dt;
  const std::size_t n = symbol.size();
  c.E.resize(n);
  c.E2.resize(n);
  c.Q.resize(n);
  c.f1.resize(n);
  c.f2.resize(n);
  c.f3.resize(n);

  std::vector<cplx> roots(M);
  for (int m = 0; m < M; ++m)
    roots[m] = std::exp(cplx(0.0, std::numbers::pi * (m + 0.5) / (0.5 * M)));

  for (std::size_t j = 0; j < n; ++j) {
    const cplx z = symbol[j] * dt;
    c.E[j] = std::exp(z);
    c.E2[j] = std::exp(0.5 * z);
    cplx q = 0.0, a = 0.0, b = 0.0, d = 0.0;
    for (const cplx& r : roots) {
      const cplx lr = z + r;
      const cplx e = std::exp(lr);
      const cplx lr3 = lr * lr * lr;
      q += (std::exp(0.5 * lr) - 1.0) / lr;
      a += (-4.0 - lr + e * (4.0 - 3.0 * lr + lr * lr)) / lr3;
      b += (2.0 + lr + e * (-2.0 + lr)) / lr3;
      d += (-4.0 - 3.0 * lr - lr * lr + e * (4.0 - lr)) / lr3;
    }
    const double inv = dt / M;
    c.Q[j] = q * inv;
    c.f1[j] = a * inv;
    c.f2[j] = b * inv;
    c.f3[j] = d * inv;
  }
  return c;
}

Stepper::Stepper(const GridSpec& g, const StepperConfig& cfg, std::vector<double> B)
    : grid_(g), cfg_(cfg), B_(std::move(B)) {
  grid_.validate();
  cfg_.validate();
  if (B_.size() != g.N) throw ValidationError("Stepper: potential size mismatch");
  coef_ = etdrk4_coefficients(linear_symbol(g), cfg_.dt, cfg_.contour_points);
}

Stepper::Stepper(const GridSpec& g, const StepperConfig& cfg, const PotentialSpec& potential)
    : Stepper(g, cfg, soliton::sample_rescaled(g, potential, 0.0)) {
  potential.validate();
  if (!potential.is_time_independent()) time_dependent_ = potential;
}

std::vector<double> Stepper::potential_at(double S) const {
  if (time_dependent_) return soliton::sample_rescaled(grid_, *time_dependent_, S);
  return B_;
}

std::vector<cplx> Stepper::forcing_hat(std::span<const cplx> vhat, double S) const {
  const std::size_t n = grid_.N;
  std::vector<cplx> filtered(vhat.begin(), vhat.end());
  if (cfg_.dealias) dealias(filtered);
  const auto V = irfft(filtered, n);
  std::vector<double> Bs;
  std::span<const double> B = B_;
  if (time_dependent_) {
    Bs = potential_at(S);
    B = Bs;
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = -3.0 * V[j] * V[j] + B[j] * V[j];
  auto what = rfft(w);
  if (cfg_.dealias) dealias(what);
  for (std::size_t j = 0; j + 1 < what.size(); ++j) what[j] *= cplx(0.0, grid_.wavenumber(j));
  what.back() = 0.0;
  return what;
}

FieldState Stepper::step(const FieldState& v) const {
  if (!(v.grid == grid_)) throw ValidationError("Stepper::step: grid mismatch");
  const std::size_t m = grid_.modes();
  const double dt = coef_.dt;
  const double S = v.time;
  const auto vhat = rfft(v.values);

  const auto Nv = forcing_hat(vhat, S);
  std::vector<cplx> a(m), b(m), c(m);
  for (std::size_t j = 0; j < m; ++j) a[j] = coef_.E2[j] * vhat[j] + coef_.Q[j] * Nv[j];
  const auto Na = forcing_hat(a, S + 0.5 * dt);
  for (std::size_t j = 0; j < m; ++j) b[j] = coef_.E2[j] * vhat[j] + coef_.Q[j] * Na[j];
  const auto Nb = forcing_hat(b, S + 0.5 * dt);
  for (std::size_t j = 0; j < m; ++j) c[j] = coef_.E2[j] * a[j] + coef_.Q[j] * (2.0 * Nb[j] - Nv[j]);
  const auto Nc = forcing_hat(c, S + dt);

  std::vector<cplx> next(m);
  for (std::size_t j = 0; j < m; ++j)
    next[j] = coef_.E[j] * vhat[j] + coef_.f1[j] * Nv[j] + 2.0 * coef_.f2[j] * (Na[j] + Nb[j]) +
              coef_.f3[j] * Nc[j];

  FieldState out{grid_, irfft(next, grid_.N), S + dt};
  double peak = 0.0;
  for (double x : out.values) {
    if (!std::isfinite(x)) {
      std::ostringstream msg;
      msg << "solution blowup at S=" << out.time << ": non-finite value";
      throw NumericalError(msg.str());
    }
    peak = std::max(peak, std::abs(x));
  }
  if (peak > cfg_.blowup_guard) {
    std::ostringstream msg;
    msg << "solution blowup at S=" << out.time << ": max|V|=" << peak << " exceeds guard "
        << cfg_.blowup_guard;
    throw NumericalError(msg.str());
  }
  return out;
}

FieldState step(const FieldState& v, const StepperConfig& cfg, std::span<const double> B) {
  Stepper s(v.grid, cfg, std::vector<double>(B.begin(), B.end()));
  return s.step(v);
}

double default_dt(const GridSpec& g, std::span<const double> V0, std::span<const double> B,
                  double guard) {
  const double dx = g.dx();
  double speed = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) speed = std::max(speed, std::abs(6.0 * V0[j] - B[j]));
  const double dispersive = 0.1 * dx * dx * dx * guard;
  if (speed == 0.0) return dispersive;
  return std::min(dispersive, 0.2 * dx / speed);
}

SimulationResult simulate(const FieldState& initial, const PotentialSpec& potential,
                          const StepperConfig& cfg, double S_end,
                          std::span<const Observer> observers) {
  cfg.validate();
  initial.grid.validate();
  if (initial.values.size() != initial.grid.N) throw ValidationError("simulate: field size mismatch");
  check_finite(initial.values, "simulate");

  SimulationResult result;
  auto emit = [&](const FieldState& f) {
    for (const auto& obs : observers) obs(f);
    result.snapshots.push_back(f);
  };

  const double span = S_end - initial.time;
  if (!(span > 0.0)) {
    result.dt = cfg.dt;
    emit(initial);
    return result;
  }
  const auto nsteps = static_cast<std::size_t>(std::ceil(span / cfg.dt - 1e-9));
  StepperConfig eff = cfg;
  eff.dt = span / static_cast<double>(nsteps);
  Stepper stepper(initial.grid, eff, potential);
  result.dt = eff.dt;

  emit(initial);
  FieldState cur = initial;
  for (std::size_t n = 1; n <= nsteps; ++n) {
    cur = stepper.step(cur);
    // accumulate time from the step count so snapshot times are exact multiples
    cur.time = initial.time + static_cast<double>(n) * eff.dt;
    if (n % static_cast<std::size_t>(cfg.snapshot_stride) == 0 || n == nsteps) emit(cur);
  }
  result.steps = nsteps;
  return result;
}

}  // namespace kdv::spectral
