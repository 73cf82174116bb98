#include "kdv/soliton.hpp"

#include <cmath>

#include "kdv/errors.hpp"

namespace kdv::soliton {

void SolitonParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("soliton scale c must be positive");
  if (!std::isfinite(a)) throw ValidationError("soliton position a must be finite");
}

double theta(double y, int order) {
  const double sech = 1.0 / std::cosh(y);
  const double s = sech * sech;
  switch (order) {
    case 0: return 2.0 * s;
    case 1: return -4.0 * s * std::tanh(y);
    case 2: return 8.0 * s - 12.0 * s * s;
    default: throw ValidationError("theta: derivative order must be 0, 1 or 2");
  }
}

double tau_profile(double y) { return 2.0 * std::tanh(y); }

EtaJet eta_and_derivatives(double x, const SolitonParams& p) {
  p.validate();
  const double c = p.c;
  const double y = c * (x - p.a);
  const double th = theta(y, 0);
  const double thp = theta(y, 1);
  EtaJet j;
  j.eta = c * c * th;
  j.da = -c * c * c * thp;
  j.dx = -j.da;
  j.dc = 2.0 * c * th + c * y * thp;
  return j;
}

double eta(double x, const SolitonParams& p) { return eta_and_derivatives(x, p).eta; }

EtaSamples sample_eta(const GridSpec& g, const SolitonParams& p) {
  p.validate();
  EtaSamples s;
  s.eta.resize(g.N);
  s.dx.resize(g.N);
  s.da.resize(g.N);
  s.dc.resize(g.N);
  s.offset.resize(g.N);
  for (std::size_t j = 0; j < g.N; ++j) {
    const double d = g.offset(g.x(j), p.a);
    const auto e = eta_and_derivatives(p.a + d, p);
    s.eta[j] = e.eta;
    s.dx[j] = e.dx;
    s.da[j] = e.da;
    s.dc[j] = e.dc;
    s.offset[j] = d;
  }
  return s;
}

FieldState soliton_field(const GridSpec& g, const SolitonParams& p, double time) {
  return FieldState{g, sample_eta(g, p).eta, time};
}

double momentum(const FieldState& u) { return inner(u.grid, u.values, u.values); }

double hamiltonian(const FieldState& u, std::span<const double> b) {
  if (b.size() != u.values.size()) throw ValidationError("hamiltonian: potential size mismatch");
  const auto ux = spectral_derivative(u.grid, u.values, 1);
  double s = 0.0;
  for (std::size_t j = 0; j < u.values.size(); ++j) {
    const double v = u.values[j];
    s += ux[j] * ux[j] - 2.0 * v * v * v + b[j] * v * v;
  }
  return 0.5 * s * u.grid.dx();
}

double hamiltonian(const FieldState& u, const PotentialSpec& b, double t) {
  return hamiltonian(u, sample_physical(u.grid, b, t));
}

std::vector<double> sample_physical(const GridSpec& g, const PotentialSpec& b, double t) {
  std::vector<double> out(g.N);
  for (std::size_t j = 0; j < g.N; ++j) out[j] = b.physical(g.x(j), t).value;
  return out;
}

std::vector<double> sample_rescaled(const GridSpec& g, const PotentialSpec& b, double S) {
  std::vector<double> out(g.N);
  for (std::size_t j = 0; j < g.N; ++j) out[j] = b.rescaled(g.x(j), S).value;
  return out;
}

GridSpec local_grid(const SolitonParams& p, std::size_t N) {
  p.validate();
  const double L = 32.0 / p.c;
  return GridSpec{N, L, p.a - 0.5 * L};
}

double restricted_B(const SolitonParams& p, const PotentialSpec& b, double t) {
  const auto g = local_grid(p);
  double s = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) {
    const double x = g.x(j);
    const double e = eta(x, p);
    s += b.physical(x, t).value * e * e;
  }
  return s * g.dx();
}

BGradient restricted_B_gradient(const SolitonParams& p, const PotentialSpec& b, double t) {
  const auto g = local_grid(p);
  BGradient out;
  for (std::size_t j = 0; j < g.N; ++j) {
    const double x = g.x(j);
    const auto e = eta_and_derivatives(x, p);
    const double bv = b.physical(x, t).value;
    out.da += 2.0 * bv * e.eta * e.da;
    out.dc += 2.0 * bv * e.eta * e.dc;
  }
  out.da *= g.dx();
  out.dc *= g.dx();
  return out;
}

double restricted_hamiltonian(const SolitonParams& p, const PotentialSpec& b, double t) {
  return -32.0 / 5.0 * std::pow(p.c, 5) + 0.5 * restricted_B(p, b, t);
}

double f_perp_leading(double x, const SolitonParams& p, const PotentialSpec& b, double t) {
  p.validate();
  const double y = p.c * (x - p.a);
  const double slope = b.physical(p.a, t).d1;
  return p.c * p.c * slope / 3.0 * (theta(y, 0) + 2.0 * y * theta(y, 1));
}

}  // namespace kdv::soliton
