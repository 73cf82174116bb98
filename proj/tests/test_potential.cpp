#include <doctest.h>

#include <cmath>

#include "kdv/errors.hpp"
#include "kdv/potential.hpp"

using namespace kdv;

namespace {

void check_derivatives(const PotentialSpec& p, double x, double t) {
  const auto v = p.physical(x, t);
  auto f = [&](double y) { return p.physical(y, t).value; };
  const double e = 1e-4;
  const double d1 = (f(x - 2 * e) - 8 * f(x - e) + 8 * f(x + e) - f(x + 2 * e)) / (12 * e);
  // coarser step for the third derivative, roundoff dominates otherwise
  const double E = 1e-2;
  const double d3 = (-f(x - 2 * E) + 2 * f(x - E) - 2 * f(x + E) + f(x + 2 * E)) / (2 * E * E * E);
  const double dt = (p.physical(x, t + e).value - p.physical(x, t - e).value) / (2 * e);
  CHECK(std::abs(v.d1 - d1) < 1e-8 * (1 + std::abs(d1)));
  CHECK(std::abs(v.d3 - d3) < 1e-3 * (1 + std::abs(d3)));
  CHECK(std::abs(v.dt - dt) < 1e-6 * (1 + std::abs(dt)));
}

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("families parse and print") {
  for (auto f : {PotentialFamily::zero, PotentialFamily::constant, PotentialFamily::sinusoidal, PotentialFamily::bump})
    CHECK(parse_potential_family(to_string(f)) == f);
  CHECK_THROWS_AS(parse_potential_family("cosine"), ValidationError);
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(PotentialSpec::sinusoidal(1.0, 0.0).validate(), ValidationError);
  CHECK_THROWS_AS(PotentialSpec::sinusoidal(1.0, 1.5).validate(), ValidationError);
  CHECK_THROWS_AS(PotentialSpec::bump(1.0, -1.0).validate(), ValidationError);
  CHECK_NOTHROW(PotentialSpec::bump(1.0, 2.0, 0.0, 0.5).validate());
}

TEST_CASE("derivatives agree with finite differences") {
  check_derivatives(PotentialSpec::sinusoidal(8.0, 0.2), 3.1, 0.0);
  check_derivatives(PotentialSpec::bump(2.0, 3.0, 1.0, 0.3), 4.0, 0.0);
  auto td = PotentialSpec::sinusoidal(2.0, 0.5);
  td.time_dependent = true;
  td.envelope_amplitude = 0.3;
  td.envelope_frequency = 2.0;
  check_derivatives(td, 1.7, 0.9);
}

TEST_CASE("frames: physical b(x,t) = b0(hx, ht), rescaled B(X,S) = h^-2 b0(X, S/h^2)") {
  auto p = PotentialSpec::sinusoidal(8.0, 0.2);
  p.time_dependent = true;
  p.envelope_amplitude = 0.5;
  p.envelope_frequency = 3.0;
  const double h = p.h, x = 7.0, t = 2.0;
  CHECK(p.physical(x, t).value == doctest::Approx(p.slow(h * x, h * t).value));
  const double X = 1.3, S = 0.01;
  CHECK(p.rescaled(X, S).value == doctest::Approx(p.slow(X, S / (h * h)).value / (h * h)));
  CHECK(p.rescaled(X, S).dt == doctest::Approx(p.slow(X, S / (h * h)).dt / std::pow(h, 4)));
}

TEST_CASE("bump has compact support") {
  const auto p = PotentialSpec::bump(1.0, 2.0, 5.0);
  CHECK(p.slow(5.0).value == doctest::Approx(1.0));
  CHECK(p.slow(7.5).value == 0.0);
  CHECK(p.slow(2.9).value == 0.0);
}

}
