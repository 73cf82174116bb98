#include "kdv/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kdv/diagnostics.hpp"
#include "kdv/errors.hpp"

namespace kdv::fit {

namespace {

// Newton on the derivative of the trigonometric interpolant, started at x0.
double fourier_refine(const FieldState& f, double x0) {
  const auto& g = f.grid;
  const auto fhat = rfft(f.values);
  const double n = static_cast<double>(g.N);
  double x = x0;
  for (int it = 0; it < 20; ++it) {
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t j = 1; j < g.N / 2; ++j) {
      const double k = g.wavenumber(j);
      const cplx e = std::exp(cplx(0.0, k * (x - g.origin)));
      const cplx term = fhat[j] * e;
      d1 += 2.0 * std::real(cplx(0.0, k) * term);
      d2 += 2.0 * std::real(-k * k * term);
    }
    d1 /= n;
    d2 /= n;
    if (d2 >= 0.0) break;
    const double dxs = -d1 / d2;
    x += dxs;
    if (std::abs(dxs) < 1e-14 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

double fourier_value(const FieldState& f, double x) {
  const auto& g = f.grid;
  const auto fhat = rfft(f.values);
  double s = std::real(fhat[0]);
  for (std::size_t j = 1; j < g.N / 2; ++j)
    s += 2.0 * std::real(fhat[j] * std::exp(cplx(0.0, g.wavenumber(j) * (x - g.origin))));
  s += std::real(fhat[g.N / 2] * std::cos(g.wavenumber(g.N / 2) * (x - g.origin)));
  return s / static_cast<double>(g.N);
}

double wrap_into(const GridSpec& g, double x) {
  double d = std::fmod(x - g.origin, g.L);
  if (d < 0) d += g.L;
  return g.origin + d;
}

}  // namespace

PeakFit peak_fit(const FieldState& field, PeakMethod method) {
  const auto& g = field.grid;
  const auto& v = field.values;
  const std::size_t n = g.N;
  const auto jmax = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  const double vmax = v[jmax];

  // background: RMS over points farther than N/8 samples from the maximum
  const std::size_t window = n / 8;
  double bg = 0.0;
  std::size_t cnt = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t dist = std::min((j + n - jmax) % n, (jmax + n - j) % n);
    if (dist > window) {
      bg += v[j] * v[j];
      ++cnt;
    }
  }
  bg = cnt ? std::sqrt(bg / static_cast<double>(cnt)) : 0.0;
  if (!(vmax > 0.0) || vmax <= 4.0 * bg) {
    std::ostringstream msg;
    msg << "peak_fit: no dominant peak (max " << vmax << ", background RMS " << bg << ")";
    throw NumericalError(msg.str());
  }

  const double fm = v[(jmax + n - 1) % n], f0 = vmax, fp = v[(jmax + 1) % n];
  const double curv = fm - 2.0 * f0 + fp;
  double shift = 0.0, peak = f0;
  if (curv < 0.0) {
    shift = 0.5 * (fm - fp) / curv;
    peak = f0 - 0.25 * (fm - fp) * shift;
  }
  double a = g.x(jmax) + shift * g.dx();
  if (method == PeakMethod::fourier) {
    a = fourier_refine(field, a);
    peak = fourier_value(field, a);
  }
  PeakFit out;
  out.a_tilde = wrap_into(g, a);
  out.peak_value = peak;
  out.c_tilde = std::sqrt(peak / 2.0);
  return out;
}

double position_weight(const GridSpec& g, double offset) {
  const double quarter = 0.25 * g.L;
  const double ad = std::abs(offset);
  if (ad <= quarter) return offset;
  return offset * diag::virial_phi(ad - quarter);
}

namespace {

double position_weight_derivative(const GridSpec& g, double offset) {
  const double quarter = 0.25 * g.L;
  const double ad = std::abs(offset);
  if (ad <= quarter) return 1.0;
  return diag::virial_phi(ad - quarter) + ad * diag::virial_phi_derivative(ad - quarter);
}

struct RefitTerms {
  std::array<double, 2> phi;
  std::array<std::array<double, 2>, 2> jac;  // minus D_(a,c) Phi
  std::vector<double> v;
};

RefitTerms evaluate(const FieldState& u, const SolitonParams& p) {
  const auto& g = u.grid;
  const auto e = soliton::sample_eta(g, p);
  RefitTerms t;
  t.v.resize(g.N);
  double phi1 = 0, phi2 = 0;
  double j11 = 0, j12 = 0, j21 = 0, j22 = 0;
  for (std::size_t j = 0; j < g.N; ++j) {
    const double w = position_weight(g, e.offset[j]);
    const double wp = position_weight_derivative(g, e.offset[j]);
    const double v = u.values[j] - e.eta[j];
    t.v[j] = v;
    phi1 += v * e.eta[j];
    phi2 += v * w * e.eta[j];
    // d/da (w eta) = -w' eta + w d_a eta
    j11 += e.da[j] * e.eta[j] - v * e.da[j];
    j12 += e.dc[j] * e.eta[j] - v * e.dc[j];
    j21 += e.da[j] * w * e.eta[j] - v * (-wp * e.eta[j] + w * e.da[j]);
    j22 += e.dc[j] * w * e.eta[j] - v * w * e.dc[j];
  }
  const double dx = g.dx();
  t.phi = {phi1 * dx, phi2 * dx};
  t.jac = {{{j11 * dx, j12 * dx}, {j21 * dx, j22 * dx}}};
  return t;
}

}  // namespace

std::array<double, 2> orthogonality_residuals(const FieldState& u, const SolitonParams& p) {
  return evaluate(u, p).phi;
}

std::array<std::array<double, 2>, 2> refit_jacobian(const FieldState& u, const SolitonParams& p) {
  return evaluate(u, p).jac;
}

RefitResult orthogonality_refit(const FieldState& u, const SolitonParams& seed, double tol,
                                int max_iters) {
  seed.validate();
  if (!(tol > 0.0)) throw ValidationError("orthogonality_refit: tol must be positive");
  SolitonParams p = seed;
  std::array<double, 2> last{};
  for (int it = 1; it <= max_iters; ++it) {
    auto t = evaluate(u, p);
    last = t.phi;
    if (std::abs(t.phi[0]) <= tol && std::abs(t.phi[1]) <= tol) {
      return RefitResult{p, FieldState{u.grid, std::move(t.v), u.time}, it, t.phi};
    }
    const auto& J = t.jac;
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (!(std::abs(det) > 0.0) || !std::isfinite(det))
      throw NumericalError("orthogonality_refit: singular Jacobian");
    // Phi + D Phi delta = 0 with D Phi = -J  =>  J delta = Phi
    const double da = (t.phi[0] * J[1][1] - J[0][1] * t.phi[1]) / det;
    const double dc = (J[0][0] * t.phi[1] - J[1][0] * t.phi[0]) / det;
    p.a += da;
    p.c += dc;
    if (!(p.c > 0.0) || !std::isfinite(p.a))
      throw NumericalError("orthogonality_refit: iteration left the admissible set (c <= 0)");
  }
  std::ostringstream msg;
  msg << "orthogonality_refit: no convergence in " << max_iters << " iterations; residuals ("
      << last[0] << ", " << last[1] << ")";
  throw NumericalError(msg.str());
}

}  // namespace kdv::fit
