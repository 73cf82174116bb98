#include <doctest.h>

#include <cmath>
#include <random>

#include "kdv/errors.hpp"
#include "kdv/soliton.hpp"

using namespace kdv;
using namespace kdv::soliton;

TEST_SUITE("soliton") {

TEST_CASE("theta solves the profile equation theta'' = 4 theta - 3 theta^2") {
  for (double y = -6; y <= 6; y += 0.37) {
    const double th = theta(y);
    CHECK(theta(y, 2) == doctest::Approx(4 * th - 3 * th * th).epsilon(1e-13).scale(1.0));
    const double e = 1e-5;
    CHECK(theta(y, 1) == doctest::Approx((theta(y + e) - theta(y - e)) / (2 * e)).epsilon(1e-8).scale(1.0));
  }
  CHECK(theta(0.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(theta(0.0, 3), ValidationError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((SolitonParams{0.0, 0.0}.validate()), ValidationError);
  CHECK_THROWS_AS((SolitonParams{0.0, -1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((SolitonParams{NAN, 1.0}.validate()), ValidationError);
}

TEST_CASE("eta is a traveling wave of speed 4c^2") {
  // -eta_xx - 3 eta^2 + 4 c^2 eta = 0
  const SolitonParams p{0.7, 1.3};
  const auto g = local_grid(p, 512);
  const auto u = soliton_field(g, p);
  const auto uxx = spectral_derivative(g, u.values, 2);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) {
    const double v = u.values[j];
    worst = std::max(worst, std::abs(-uxx[j] - 3 * v * v + 4 * p.c * p.c * v));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("parameter derivatives") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ua(-2, 2), uc(0.5, 2), ux(-3, 3);
  for (int k = 0; k < 20; ++k) {
    const SolitonParams p{ua(rng), uc(rng)};
    const double x = p.a + ux(rng) / p.c;
    const auto j = eta_and_derivatives(x, p);
    const double e = 1e-6;
    CHECK(j.da == doctest::Approx(-j.dx));
    const double fdc = (eta(x, {p.a, p.c + e}) - eta(x, {p.a, p.c - e})) / (2 * e);
    CHECK(std::abs(j.dc - fdc) < 1e-7);
    const double fdx = (eta(x + e, p) - eta(x - e, p)) / (2 * e);
    CHECK(std::abs(j.dx - fdx) < 1e-7);
  }
}

TEST_CASE("momentum and Hamiltonian of the soliton") {
  for (double c : {0.5, 1.0, 1.7}) {
    const SolitonParams p{0.0, c};
    const auto g = local_grid(p, 1024);
    const auto u = soliton_field(g, p);
    CHECK(momentum(u) == doctest::Approx(16.0 / 3.0 * c * c * c).epsilon(1e-12));
    CHECK(hamiltonian(u, PotentialSpec::zero(), 0.0) == doctest::Approx(-32.0 / 5.0 * std::pow(c, 5)).epsilon(1e-10));
    CHECK(restricted_hamiltonian(p, PotentialSpec::zero(), 0.0) == doctest::Approx(-32.0 / 5.0 * std::pow(c, 5)));
  }
}

TEST_CASE("restricted B: constant potential and gradient") {
  const SolitonParams p{1.0, 1.2};
  CHECK(restricted_B(p, PotentialSpec::constant(2.0), 0.0) == doctest::Approx(2.0 * 16.0 / 3.0 * std::pow(1.2, 3)));
  const auto b = PotentialSpec::sinusoidal(3.0, 0.3);
  const auto gr = restricted_B_gradient(p, b, 0.0);
  const double e = 1e-5;
  const double fa = (restricted_B({p.a + e, p.c}, b, 0.0) - restricted_B({p.a - e, p.c}, b, 0.0)) / (2 * e);
  const double fc = (restricted_B({p.a, p.c + e}, b, 0.0) - restricted_B({p.a, p.c - e}, b, 0.0)) / (2 * e);
  CHECK(gr.da == doctest::Approx(fa).epsilon(1e-7));
  CHECK(gr.dc == doctest::Approx(fc).epsilon(1e-7));
}

TEST_CASE("sampling wraps around the periodic box") {
  const GridSpec g{256, 20.0, -10.0};
  const SolitonParams p{9.5, 1.0};
  const auto s = sample_eta(g, p);
  // grid points just right of the left edge sit right of a across the seam
  for (std::size_t j : {0u, 3u, 6u}) {
    const double d = g.x(j) + g.L - p.a;
    CHECK(s.offset[j] == doctest::Approx(d).epsilon(1e-12));
    CHECK(s.eta[j] == doctest::Approx(eta(p.a + d, p)).epsilon(1e-12));
  }
}

}
