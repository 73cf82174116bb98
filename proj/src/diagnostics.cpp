#include "kdv/diagnostics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

#include "kdv/errors.hpp"

namespace kdv::diag {

namespace {

constexpr double kPlateau = 1.0;
constexpr double kBlendWidth = 0.5;

double smoothstep5(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep5_prime(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }

double rms(std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s / static_cast<double>(f.size()));
}

}  // namespace

double virial_phi(double x) {
  const double ax = std::abs(x);
  if (ax <= kPlateau) return 1.0;
  if (ax >= kPlateau + kBlendWidth) return std::exp(-ax);
  const double s = smoothstep5((ax - kPlateau) / kBlendWidth);
  return std::exp(-ax * s);
}

double virial_phi_derivative(double x) {
  const double ax = std::abs(x);
  double d;
  if (ax <= kPlateau) {
    d = 0.0;
  } else if (ax >= kPlateau + kBlendWidth) {
    d = -std::exp(-ax);
  } else {
    const double t = (ax - kPlateau) / kBlendWidth;
    const double s = smoothstep5(t);
    d = -std::exp(-ax * s) * (s + ax * smoothstep5_prime(t) / kBlendWidth);
  }
  return x < 0 ? -d : d;
}

double virial_Psi(double x) {
  const double ax = std::abs(x);
  double v;
  if (ax <= kPlateau) {
    v = ax;
  } else {
    const double top = std::min(ax, kPlateau + kBlendWidth);
    v = kPlateau + boost::math::quadrature::gauss<double, 20>::integrate(
                       [](double y) { return virial_phi(y); }, kPlateau, top);
    if (ax > top) v += std::exp(-top) - std::exp(-ax);
  }
  return x < 0 ? -v : v;
}

double virial_Psi_limit() {
  static const double limit = virial_Psi(kPlateau + kBlendWidth) + std::exp(-(kPlateau + kBlendWidth));
  return limit;
}

VirialWeight VirialWeight::tabulate(const GridSpec& g, double a, double A_scale) {
  if (!(A_scale > 0.0)) throw ValidationError("virial scale A must be positive");
  VirialWeight w;
  w.A_scale = A_scale;
  w.center = a;
  w.phi.resize(g.N);
  w.psi.resize(g.N);
  for (std::size_t j = 0; j < g.N; ++j) {
    const double d = g.offset(g.x(j), a) / A_scale;
    w.phi[j] = virial_phi(d);
    w.psi[j] = A_scale * virial_Psi(d);
  }
  return w;
}

double h1_norm(const FieldState& v) {
  const auto vx = spectral_derivative(v.grid, v.values, 1);
  return std::sqrt(inner(v.grid, v.values, v.values) + inner(v.grid, vx, vx));
}

double weighted_h1(const FieldState& v, double a, double eps) {
  if (!(eps > 0.0)) throw ValidationError("weighted_h1: eps must be positive");
  const auto& g = v.grid;
  const auto vx = spectral_derivative(g, v.values, 1);
  double s = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) {
    const double w = std::exp(-eps * std::abs(g.offset(g.x(j), a)));
    s += (v.values[j] * v.values[j] + vx[j] * vx[j]) * w;
  }
  return std::sqrt(s * g.dx());
}

double energy_functional(const FieldState& v, const SolitonParams& p) {
  p.validate();
  const auto& g = v.grid;
  const auto e = soliton::sample_eta(g, p);
  const auto vx = spectral_derivative(g, v.values, 1);
  const double c2 = p.c * p.c;
  double quad = 0.0, cubic = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) {
    const double u = v.values[j];
    quad += 4.0 * c2 * u * u + vx[j] * vx[j] - 6.0 * e.eta[j] * u * u;
    cubic += u * u * u;
  }
  return (0.5 * quad - cubic) * g.dx();
}

double virial_quantity(const FieldState& v, const VirialWeight& w) {
  if (w.psi.size() != v.values.size()) throw ValidationError("virial_quantity: weight not tabulated for this grid");
  double s = 0.0;
  for (std::size_t j = 0; j < v.values.size(); ++j) s += w.psi[j] * v.values[j] * v.values[j];
  return s * v.grid.dx();
}

FieldState partial_x_inverse(const FieldState& f) {
  const auto& g = f.grid;
  const double mean = integrate(g, f.values) / g.L;
  if (std::abs(mean) > 1e-10 * std::max(rms(f.values), 1e-300))
    throw ValidationError("partial_x_inverse: input is not mean-zero");
  auto fhat = rfft(f.values);
  fhat[0] = 0.0;
  fhat.back() = 0.0;
  for (std::size_t j = 1; j + 1 < fhat.size(); ++j) fhat[j] /= cplx(0.0, g.wavenumber(j));
  return FieldState{g, irfft(fhat, g.N), f.time};
}

double symplectic_form(const FieldState& u, const FieldState& v) {
  const auto jv = partial_x_inverse(v);
  return inner(u.grid, u.values, jv.values);
}

std::vector<double> finite_difference(std::span<const double> y, double dt) {
  const std::size_t n = y.size();
  if (n < 3) throw ValidationError("finite_difference: need at least 3 samples");
  std::vector<double> d(n);
  d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dt);
  d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dt);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (i >= 2 && i + 2 < n)
      d[i] = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * dt);
    else
      d[i] = (y[i + 1] - y[i - 1]) / (2.0 * dt);
  }
  return d;
}

namespace {

double uniform_spacing(std::span<const double> t) {
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) throw ValidationError("time samples must be increasing");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt)
      throw ValidationError("time samples must be uniformly spaced");
  return dt;
}

}  // namespace

std::vector<ParameterResidual> parameter_residuals(std::span<const FitSample> traj,
                                                   const PotentialSpec& b) {
  if (traj.size() < 3) throw ValidationError("parameter_residuals: need at least 3 fit samples");
  std::vector<double> t, a, c;
  for (const auto& s : traj) {
    t.push_back(s.t);
    a.push_back(s.a);
    c.push_back(s.c);
  }
  const double dt = uniform_spacing(t);
  const auto ad = finite_difference(a, dt);
  const auto cd = finite_difference(c, dt);
  std::vector<ParameterResidual> out(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto bv = b.physical(a[i], t[i]);
    out[i] = {t[i], ad[i], cd[i], ad[i] - 4.0 * c[i] * c[i] + bv.value, cd[i] - c[i] * bv.d1 / 3.0};
  }
  return out;
}

std::vector<ConservationResidual> conservation_residuals(std::span<const FieldState> snapshots,
                                                         const PotentialSpec& b, Frame frame) {
  std::vector<ConservationResidual> out(snapshots.size());
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const auto& u = snapshots[i];
    const auto& g = u.grid;
    std::vector<double> bv(g.N);
    double pl = 0.0, hl = 0.0;
    for (std::size_t j = 0; j < g.N; ++j) {
      const auto pv = frame == Frame::physical ? b.physical(g.x(j), u.time) : b.rescaled(g.x(j), u.time);
      bv[j] = pv.value;
      const double u2 = u.values[j] * u.values[j];
      pl += pv.d1 * u2;
      hl += 0.5 * pv.dt * u2;
    }
    out[i].t = u.time;
    out[i].P = soliton::momentum(u);
    out[i].H = soliton::hamiltonian(u, bv);
    out[i].P_law = pl * g.dx();
    out[i].H_law = hl * g.dx();
  }
  if (snapshots.size() >= 3) {
    std::vector<double> t, P, H;
    for (const auto& r : out) {
      t.push_back(r.t);
      P.push_back(r.P);
      H.push_back(r.H);
    }
    const double dt = uniform_spacing(t);
    const auto dP = finite_difference(P, dt);
    const auto dH = finite_difference(H, dt);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].dP_dt = dP[i];
      out[i].dH_dt = dH[i];
      out[i].P_residual = dP[i] - out[i].P_law;
      out[i].H_residual = dH[i] - out[i].H_law;
    }
  }
  return out;
}

ForcingDecomposition forcing_decomposition_residual(const SolitonParams& p, double a_dot,
                                                    double c_dot, const PotentialSpec& b, double t,
                                                    std::size_t N) {
  p.validate();
  const auto g = soliton::local_grid(p, N);
  const double c = p.c;
  std::vector<double> F(g.N), da(g.N), dc(g.N), jda(g.N), jdc(g.N), leading(g.N);
  for (std::size_t j = 0; j < g.N; ++j) {
    const double x = g.x(j);
    const auto e = soliton::eta_and_derivatives(x, p);
    const auto bv = b.physical(x, t);
    const double y = c * (x - p.a);
    da[j] = e.da;
    dc[j] = e.dc;
    jda[j] = -e.eta;                                          // d_x^-1 d_a eta
    jdc[j] = soliton::tau_profile(y) + y * soliton::theta(y);  // d_x^-1 d_c eta
    F[j] = -(a_dot - 4.0 * c * c) * e.da - c_dot * e.dc + bv.d1 * e.eta + bv.value * e.dx;
    leading[j] = soliton::f_perp_leading(x, p, b, t);
  }
  // omega(F - alpha d_a eta - beta d_c eta, d_a eta) = omega(..., d_c eta) = 0
  const double m11 = inner(g, da, jda), m12 = inner(g, dc, jda);
  const double m21 = inner(g, da, jdc), m22 = inner(g, dc, jdc);
  const double r1 = inner(g, F, jda), r2 = inner(g, F, jdc);
  const double det = m11 * m22 - m12 * m21;
  if (std::abs(det) < 1e-300) throw NumericalError("forcing decomposition: degenerate symplectic Gram matrix");
  ForcingDecomposition out;
  out.alpha = (r1 * m22 - m12 * r2) / det;
  out.beta = (m11 * r2 - m21 * r1) / det;
  std::vector<double> perp(g.N), diff(g.N), xeta(g.N);
  for (std::size_t j = 0; j < g.N; ++j) xeta[j] = (g.x(j) - p.a) * (-jda[j]);
  for (std::size_t j = 0; j < g.N; ++j) {
    perp[j] = F[j] - out.alpha * da[j] - out.beta * dc[j];
    diff[j] = perp[j] - leading[j];
  }
  out.omega_a = inner(g, perp, jda);
  out.omega_c = inner(g, perp, jdc);
  out.perp_deviation = std::sqrt(inner(g, diff, diff));
  out.f0_norm = std::sqrt(inner(g, F, F));
  out.leading_moment = inner(g, leading, xeta);
  out.leading_omega_a = inner(g, leading, jda);
  return out;
}

DiagnosticsRecord snapshot_record(const FieldState& u, const SolitonParams& p, const FieldState& v,
                                  std::array<double, 2> orth, const PotentialSpec& b,
                                  const DiagnosticsOptions& opt) {
  DiagnosticsRecord r;
  r.time = u.time;
  r.P = soliton::momentum(u);
  r.H = soliton::hamiltonian(u, b, u.time);
  r.a = p.a;
  r.c = p.c;
  r.h1_norm_v = h1_norm(v);
  const double eps = opt.eps > 0.0 ? opt.eps : 0.5 * std::min(p.c, 1.0);
  r.weighted_h1_v = weighted_h1(v, p.a, eps);
  r.orth1 = orth[0];
  r.orth2 = orth[1];
  r.energy_E = energy_functional(v, p);
  r.virial_psi_v2 = virial_quantity(v, VirialWeight::tabulate(v.grid, p.a, opt.A_scale));
  return r;
}

void complete_records(std::vector<DiagnosticsRecord>& records, std::span<const FieldState> snapshots,
                      const PotentialSpec& b) {
  if (records.size() != snapshots.size())
    throw ValidationError("complete_records: records and snapshots differ in length");
  if (records.size() < 3) return;
  std::vector<FitSample> fits;
  for (const auto& r : records) fits.push_back({r.time, r.a, r.c});
  const auto pr = parameter_residuals(fits, b);
  const auto cr = conservation_residuals(snapshots, b, Frame::physical);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].res_a = pr[i].res_a;
    records[i].res_c = pr[i].res_c;
    records[i].momentum_law_residual = cr[i].P_residual;
  }
}

}  // namespace kdv::diag
