#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "kdv/errors.hpp"
#include "kdv/fitting.hpp"
#include "kdv/soliton.hpp"
#include "kdv/spectral_pde.hpp"

using namespace kdv;
using mp = boost::multiprecision::cpp_bin_float_50;

namespace {

// minimal complex arithmetic in 50 digits, enough for the phi combinations
struct C50 {
  mp re, im;
};
C50 operator+(const C50& a, const C50& b) { return {a.re + b.re, a.im + b.im}; }
C50 operator-(const C50& a, const C50& b) { return {a.re - b.re, a.im - b.im}; }
C50 operator*(const C50& a, const C50& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
C50 operator/(const C50& a, const C50& b) {
  const mp d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
C50 real(double x) { return {mp(x), mp(0)}; }
cplx to_double(const C50& a) { return {static_cast<double>(a.re), static_cast<double>(a.im)}; }

struct Oracle {
  cplx E, E2, Q, f1, f2, f3;
};

// z = i w purely imaginary; closed forms with 50-digit cancellation headroom
Oracle oracle(double w, double dt) {
  const C50 z{mp(0), mp(w) * mp(dt)};
  const C50 ez{cos(z.im), sin(z.im)};
  const C50 ez2{cos(z.im / 2), sin(z.im / 2)};
  const C50 h = real(dt);
  const C50 z3 = z * z * z;
  Oracle o;
  o.E = to_double(ez);
  o.E2 = to_double(ez2);
  o.Q = to_double(h * (ez2 - real(1)) / z);
  o.f1 = to_double(h * (real(-4) - z + ez * (real(4) - real(3) * z + z * z)) / z3);
  o.f2 = to_double(h * (real(2) + z + ez * (z - real(2))) / z3);
  o.f3 = to_double(h * (real(-4) - real(3) * z - z * z + ez * (real(4) - z)) / z3);
  return o;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double transport_error(std::size_t N, double dt, double* center_err = nullptr) {
  const GridSpec g{N, 40 * M_PI, -20 * M_PI};
  const soliton::SolitonParams p{0.0, 1.0};
  spectral::StepperConfig cfg;
  cfg.dt = dt;
  cfg.snapshot_stride = 1000000;
  const auto r = spectral::simulate(soliton::soliton_field(g, p), PotentialSpec::zero(), cfg, 1.0);
  const auto& u = r.snapshots.back();
  const auto exact = soliton::soliton_field(g, {4.0, 1.0}, 1.0);
  std::vector<double> d(N);
  for (std::size_t j = 0; j < N; ++j) d[j] = u.values[j] - exact.values[j];
  if (center_err) {
    const auto rf = fit::orthogonality_refit(u, fit::peak_fit(u, fit::PeakMethod::fourier).params(), 1e-12);
    *center_err = std::abs(rf.params.a - 4.0);
  }
  return std::sqrt(inner(g, d, d));
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("ETDRK4 tables match a 50-digit oracle") {
  const GridSpec g{256, 40 * M_PI, -20 * M_PI};
  for (double dt : {1e-3, 1e-5}) {
    const auto sym = spectral::linear_symbol(g);
    const auto c = spectral::etdrk4_coefficients(sym, dt, 32);
    double worst = 0.0;
    for (std::size_t j = 1; j < g.N / 2; ++j) {
      const auto o = oracle(sym[j].imag(), dt);
      worst = std::max({worst, rel(c.E[j], o.E), rel(c.E2[j], o.E2), rel(c.Q[j], o.Q), rel(c.f1[j], o.f1),
                        rel(c.f2[j], o.f2), rel(c.f3[j], o.f3)});
    }
    CHECK(worst < 1e-13);
    // zero mode: the phi limits 1, 1/6, 1/6, 1/6 (times dt) and Q = dt/2
    CHECK(c.f1[0].real() == doctest::Approx(dt / 6));
    CHECK(c.f2[0].real() == doctest::Approx(dt / 6));
    CHECK(c.f3[0].real() == doctest::Approx(dt / 6));
    CHECK(c.Q[0].real() == doctest::Approx(dt / 2));
  }
}

TEST_CASE("linear symbol is i k^3 with zero Nyquist") {
  const GridSpec g{64, 2 * M_PI, 0.0};
  const auto s = spectral::linear_symbol(g);
  CHECK(s[3] == cplx(0.0, 27.0));
  CHECK(s[32] == cplx(0.0));
}

TEST_CASE("nonlinear term of sin x is -3 sin 2x") {
  const GridSpec g{64, 2 * M_PI, 0.0};
  auto f = FieldState::zeros(g);
  for (std::size_t j = 0; j < g.N; ++j) f.values[j] = std::sin(g.x(j));
  const std::vector<double> B(g.N, 0.0);
  for (bool d : {true, false}) {
    const auto nl = spectral::nonlinear_term(f, B, d);
    for (std::size_t j = 0; j < g.N; ++j) CHECK(nl[j] == doctest::Approx(-3 * std::sin(2 * g.x(j))).scale(1.0));
  }
}

TEST_CASE("small-amplitude Airy wave follows the exact dispersion") {
  const GridSpec g{128, 2 * M_PI, 0.0};
  const double eps = 1e-7, k = 3.0, t = 0.1;
  auto f = FieldState::zeros(g);
  for (std::size_t j = 0; j < g.N; ++j) f.values[j] = eps * std::sin(k * g.x(j));
  spectral::StepperConfig cfg;
  cfg.dt = 1e-3;
  const auto r = spectral::simulate(f, PotentialSpec::zero(), cfg, t);
  const auto& u = r.snapshots.back();
  for (std::size_t j = 0; j < g.N; j += 7)
    CHECK(u.values[j] == doctest::Approx(eps * std::sin(k * g.x(j) + k * k * k * t)).epsilon(1e-6).scale(eps));
}

TEST_CASE("exact soliton transport and fourth-order convergence") {
  double center = 0.0;
  const double e1 = transport_error(1024, 2e-3);
  const double e2 = transport_error(1024, 1e-3, &center);
  CHECK(e2 < 1e-5);
  CHECK(center < 1e-4);
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.5);
  CHECK(order < 4.5);
}

TEST_CASE("snapshots, observers and exact end time") {
  const GridSpec g{128, 40.0, -20.0};
  const auto u0 = soliton::soliton_field(g, {0.0, 1.0});
  spectral::StepperConfig cfg;
  cfg.dt = 3e-3;
  cfg.snapshot_stride = 5;
  int calls = 0;
  const spectral::Observer obs[] = {[&calls](const FieldState&) { ++calls; }};
  const auto r = spectral::simulate(u0, PotentialSpec::zero(), cfg, 0.1, obs);
  CHECK(r.snapshots.back().time == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(static_cast<double>(r.steps) * r.dt == doctest::Approx(0.1));
  CHECK(calls == static_cast<int>(r.snapshots.size()));
  CHECK(r.snapshots.front().time == 0.0);

  const auto none = spectral::simulate(u0, PotentialSpec::zero(), cfg, 0.0);
  CHECK(none.snapshots.size() == 1);
  CHECK(none.steps == 0);
}

TEST_CASE("runs are bitwise deterministic") {
  const GridSpec g{256, 8 * M_PI, 2.5 - 4 * M_PI};
  const auto V0 = soliton::soliton_field(g, {2.5, 5.0});
  spectral::StepperConfig cfg;
  cfg.dt = 4e-6;
  const auto pot = PotentialSpec::sinusoidal(8.0, 0.2);
  const auto a = spectral::simulate(V0, pot, cfg, 2e-4);
  const auto b = spectral::simulate(V0, pot, cfg, 2e-4);
  CHECK(a.snapshots.back().values == b.snapshots.back().values);
}

TEST_CASE("time-dependent potential with zero envelope matches the static one") {
  const GridSpec g{256, 8 * M_PI, 2.5 - 4 * M_PI};
  const auto V0 = soliton::soliton_field(g, {2.5, 5.0});
  spectral::StepperConfig cfg;
  cfg.dt = 4e-6;
  auto pot = PotentialSpec::sinusoidal(8.0, 0.2);
  const auto a = spectral::simulate(V0, pot, cfg, 1e-4);
  pot.time_dependent = true;
  pot.envelope_frequency = 1.0;
  const auto b = spectral::simulate(V0, pot, cfg, 1e-4);
  for (std::size_t j = 0; j < g.N; ++j)
    CHECK(a.snapshots.back().values[j] == doctest::Approx(b.snapshots.back().values[j]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("errors") {
  spectral::StepperConfig bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad.dt = 1e-3;
  bad.contour_points = 15;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  // an oversized step on an under-resolved tall soliton blows up
  const GridSpec g{64, 10.0, -5.0};
  spectral::StepperConfig cfg;
  cfg.dt = 0.05;
  CHECK_THROWS_AS(spectral::simulate(soliton::soliton_field(g, {0.0, 6.0}), PotentialSpec::zero(), cfg, 50.0),
                  NumericalError);
}

}
