#pragma once

#include <span>
#include <vector>

#include "kdv/grid.hpp"
#include "kdv/potential.hpp"

namespace kdv::soliton {

/// Position a and scale c of the soliton eta(x, a, c) = c^2 theta(c (x - a)).
/// Peak 2 c^2 sits at x = a. c must be positive.
struct SolitonParams {
  double a = 0.0;
  double c = 1.0;

  void validate() const;
};

/// theta(y) = 2 sech^2 y and its first two derivatives (order 0, 1, 2).
double theta(double y, int order = 0);

/// tau(y) = 2 tanh y, the antiderivative of theta vanishing at 0.
double tau_profile(double y);

struct EtaJet {
  double eta = 0.0;
  double dx = 0.0;  // d/dx eta
  double da = 0.0;  // d/da eta = -d/dx eta
  double dc = 0.0;  // d/dc eta
};

EtaJet eta_and_derivatives(double x, const SolitonParams& p);
double eta(double x, const SolitonParams& p);

/// Grid samples of eta and its parameter derivatives, with x - a measured as
/// the periodic offset so the profile is centered on a.
struct EtaSamples {
  std::vector<double> eta, dx, da, dc;
  std::vector<double> offset;  // periodic x - a
};
EtaSamples sample_eta(const GridSpec& g, const SolitonParams& p);

/// Exact soliton on the grid as a field.
FieldState soliton_field(const GridSpec& g, const SolitonParams& p, double time = 0.0);

/// P = integral of u^2.
double momentum(const FieldState& u);

/// H = 1/2 integral (u_x^2 - 2 u^3 + b u^2) with b given as grid samples.
double hamiltonian(const FieldState& u, std::span<const double> b);
/// Same, with b(x, t) sampled from the potential in the physical frame.
double hamiltonian(const FieldState& u, const PotentialSpec& b, double t);

/// b(x, t) sampled on the grid, physical frame.
std::vector<double> sample_physical(const GridSpec& g, const PotentialSpec& b, double t);
/// B(X, S) sampled on the grid, rescaled frame.
std::vector<double> sample_rescaled(const GridSpec& g, const PotentialSpec& b, double S);

/// Grid on which restricted quantities are integrated: centered on a,
/// wide enough that eta^2 < 1e-25 at the edges.
GridSpec local_grid(const SolitonParams& p, std::size_t N = 2048);

/// B(a, c, t) = integral b(x, t) eta(x, a, c)^2 dx.
double restricted_B(const SolitonParams& p, const PotentialSpec& b, double t);

struct BGradient {
  double da = 0.0;
  double dc = 0.0;
};
/// (dB/da, dB/dc) by quadrature of 2 b eta d_a eta and 2 b eta d_c eta.
BGradient restricted_B_gradient(const SolitonParams& p, const PotentialSpec& b, double t);

/// Restricted Hamiltonian -(32/5) c^5 + B/2.
double restricted_hamiltonian(const SolitonParams& p, const PotentialSpec& b, double t);

/// Leading symplectically orthogonal forcing
/// (1/3) c^2 b'(a) (theta(y) + 2 y theta'(y)) at y = c (x - a).
double f_perp_leading(double x, const SolitonParams& p, const PotentialSpec& b, double t = 0.0);

}  // namespace kdv::soliton
