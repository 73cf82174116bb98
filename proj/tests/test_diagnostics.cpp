#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "kdv/diagnostics.hpp"
#include "kdv/effective_ode.hpp"
#include "kdv/errors.hpp"
#include "kdv/operator_lab.hpp"
#include "kdv/spectral_pde.hpp"

using namespace kdv;
using namespace kdv::diag;

namespace {

// smooth random field: a few Gaussians, optionally with the mean removed
std::vector<double> random_field(const GridSpec& g, std::mt19937& rng, bool mean_zero) {
  std::normal_distribution<double> nd;
  std::vector<double> f(g.N, 0.0);
  for (int m = 0; m < 5; ++m) {
    const double c = nd(rng), x0 = g.origin + g.L * (0.5 + 0.2 * nd(rng)), s = 0.7 + std::abs(nd(rng));
    for (std::size_t j = 0; j < g.N; ++j) {
      const double d = g.offset(g.x(j), x0);
      f[j] += c * std::exp(-d * d / (s * s));
    }
  }
  if (mean_zero) {
    const double m = integrate(g, f) / g.L;
    for (auto& x : f) x -= m;
  }
  return f;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("virial profile: evenness, plateau, envelope bounds, smoothness") {
  for (double x = 0.0; x <= 12.0; x += 0.01) {
    const double p = virial_phi(x);
    CHECK(virial_phi(-x) == p);
    if (x <= 1.0) CHECK(p == 1.0);
    CHECK(p >= std::exp(-x) * (1 - 1e-15));
    CHECK(p <= 3 * std::exp(-x));
    const double e = 1e-6;
    CHECK(virial_phi_derivative(x) == doctest::Approx((virial_phi(x + e) - virial_phi(x - e)) / (2 * e)).epsilon(1e-6).scale(1.0));
  }
  // C^2 across the blend ends: a jump in Phi'' would make the one-sided
  // second differences disagree at O(e); smooth data gives O(e^2)
  auto mismatch = [](double x0, double e) {
    const double left = virial_phi_derivative(x0 - e) - virial_phi_derivative(x0 - 2 * e);
    const double right = virial_phi_derivative(x0 + 2 * e) - virial_phi_derivative(x0 + e);
    return std::abs(left - right);
  };
  for (double x0 : {1.0, 1.5}) CHECK(mismatch(x0, 1e-3) / mismatch(x0, 5e-4) > 3.5);
}

TEST_CASE("Psi is the antiderivative of Phi") {
  for (double x : {0.3, 1.2, 1.49, 2.0, 5.0}) {
    const double q = boost::math::quadrature::gauss_kronrod<double, 31>::integrate([](double y) { return virial_phi(y); },
                                                                                  0.0, x, 15, 1e-14);
    CHECK(virial_Psi(x) == doctest::Approx(q).epsilon(1e-12));
    CHECK(virial_Psi(-x) == -virial_Psi(x));
  }
  CHECK(virial_Psi(60.0) == doctest::Approx(virial_Psi_limit()).epsilon(1e-15));
}

TEST_CASE("tabulated weight is even about its center and bounded") {
  const GridSpec g{512, 200.0, -100.0};
  const auto w = VirialWeight::tabulate(g, 0.0, 10.0);
  for (std::size_t j = 1; j < g.N; ++j) {
    const std::size_t k = g.N - j;
    CHECK(w.phi[j] == doctest::Approx(w.phi[k]));
    CHECK(w.psi[j] == doctest::Approx(-w.psi[k]));
    CHECK(std::abs(w.psi[j]) <= w.psi_bound());
  }
  CHECK_THROWS_AS(VirialWeight::tabulate(g, 0.0, 0.0), ValidationError);
}

TEST_CASE("finite differences: exactness and order") {
  std::vector<double> y(9);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = 0.1 * static_cast<double>(i);
    y[i] = 1 + 2 * t - t * t + 0.5 * t * t * t;
  }
  const auto d = finite_difference(y, 0.1);
  for (std::size_t i = 2; i + 2 < y.size(); ++i) {
    const double t = 0.1 * static_cast<double>(i);
    CHECK(d[i] == doctest::Approx(2 - 2 * t + 1.5 * t * t).epsilon(1e-12));
  }
  auto err = [](double h) {
    std::vector<double> s(41);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(h * static_cast<double>(i));
    const auto ds = finite_difference(s, h);
    return std::abs(ds[20] - std::cos(20 * h));
  };
  CHECK(std::log2(err(0.02) / err(0.01)) > 3.8);
  CHECK_THROWS_AS(finite_difference(std::vector<double>{1.0, 2.0}, 0.1), ValidationError);
}

TEST_CASE("parameter residuals vanish on the effective trajectory") {
  const double h = 0.1;
  const auto b = PotentialSpec::sinusoidal(2.0, h);
  const auto tr = ode::integrate({1.0, 1.0, 0.0}, b, 0.25, 1.0, 1e-12);
  std::vector<FitSample> s;
  for (int i = 0; i <= 200; ++i) {
    const double T = i / 200.0;
    const auto st = tr.at(T);
    s.push_back({T / h, st.A / h, st.C});
  }
  const auto r = parameter_residuals(s, b);
  for (std::size_t i = 2; i + 2 < r.size(); ++i) {
    CHECK(std::abs(r[i].res_a) < 1e-6);
    CHECK(std::abs(r[i].res_c) < 1e-6);
  }
  s[5].t += 1e-3;
  CHECK_THROWS_AS(parameter_residuals(s, b), ValidationError);
}

TEST_CASE("functionals are translation invariant on the periodic grid") {
  std::mt19937 rng(99);
  const GridSpec g{256, 40.0, -20.0};
  const auto f = random_field(g, rng, false);
  const SolitonParams p{0.0, 1.0};
  const FieldState v{g, f, 0.0};
  for (std::size_t s : {13u, 77u, 200u}) {
    FieldState vs{g, std::vector<double>(g.N), 0.0};
    for (std::size_t j = 0; j < g.N; ++j) vs.values[(j + s) % g.N] = f[j];
    const double a = static_cast<double>(s) * g.dx();
    CHECK(std::abs(h1_norm(vs) - h1_norm(v)) < 1e-10);
    CHECK(std::abs(weighted_h1(vs, a, 0.5) - weighted_h1(v, 0.0, 0.5)) < 1e-10);
    CHECK(std::abs(energy_functional(vs, {a, 1.0}) - energy_functional(v, p)) < 1e-10);
    CHECK(std::abs(virial_quantity(vs, VirialWeight::tabulate(g, a)) - virial_quantity(v, VirialWeight::tabulate(g, 0.0))) <
          1e-10);
  }
}

TEST_CASE("symplectic form: antisymmetry and inverse derivative") {
  std::mt19937 rng(4);
  const GridSpec g{256, 30.0, -15.0};
  for (int k = 0; k < 10; ++k) {
    const FieldState u{g, random_field(g, rng, true), 0.0}, v{g, random_field(g, rng, true), 0.0};
    CHECK(std::abs(symplectic_form(u, v) + symplectic_form(v, u)) < 1e-10);
    FieldState ux{g, spectral_derivative(g, u.values, 1), 0.0};
    const auto back = partial_x_inverse(ux);
    for (std::size_t j = 0; j < g.N; ++j) CHECK(std::abs(back.values[j] - u.values[j]) < 1e-9);
  }
  FieldState ones{g, std::vector<double>(g.N, 1.0), 0.0};
  CHECK_THROWS_AS(partial_x_inverse(ones), ValidationError);
}

TEST_CASE("energy functional matches the dense operator path") {
  std::mt19937 rng(8);
  const GridSpec g{256, 40.0, -20.0};
  for (int k = 0; k < 5; ++k) {
    auto f = random_field(g, rng, false);
    for (auto& x : f) x *= 0.1;
    const FieldState v{g, f, 0.0};
    const SolitonParams p{0.5 * k - 1.0, 0.8 + 0.1 * k};
    CHECK(std::abs(energy_functional(v, p) - oplab::energy_functional_matrix(v, p)) < 1e-9);
  }
}

TEST_CASE("weighted norm never exceeds the plain norm") {
  std::mt19937 rng(12);
  const GridSpec g{256, 40.0, -20.0};
  const FieldState v{g, random_field(g, rng, false), 0.0};
  CHECK(weighted_h1(v, 1.0, 0.5) <= h1_norm(v) + 1e-14);
  CHECK(weighted_h1(v, 1.0, 1e-12) == doctest::Approx(h1_norm(v)));
  CHECK_THROWS_AS(weighted_h1(v, 1.0, 0.0), ValidationError);
}

TEST_CASE("conservation of P and H without potential") {
  const GridSpec g{512, 40 * M_PI, -20 * M_PI};
  spectral::StepperConfig cfg;
  cfg.dt = 2e-3;
  cfg.snapshot_stride = 50;
  const auto r = spectral::simulate(soliton::soliton_field(g, {0.0, 1.0}), PotentialSpec::zero(), cfg, 1.0);
  const auto cr = conservation_residuals(r.snapshots, PotentialSpec::zero(), Frame::rescaled);
  for (const auto& c : cr) {
    CHECK(std::abs(c.P / cr[0].P - 1) < 1e-8);
    CHECK(std::abs(c.H / cr[0].H - 1) < 1e-6);
  }
}

TEST_CASE("forcing decomposition: orthogonality and h^2 deviation") {
  std::vector<double> dev;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto b = PotentialSpec::sinusoidal(2.0, h);
    const SolitonParams p{1.0 / h, 1.2};
    const auto bv = b.physical(p.a);
    const auto f = forcing_decomposition_residual(p, 4 * p.c * p.c - bv.value, p.c * bv.d1 / 3, b);
    CHECK(std::abs(f.omega_a) < 1e-10);
    CHECK(std::abs(f.omega_c) < 1e-10);
    CHECK(std::abs(f.leading_moment) < 1e-10);
    CHECK(std::abs(f.leading_omega_a) < 1e-10);
    dev.push_back(f.perp_deviation);
  }
  CHECK(std::log2(dev[0] / dev[1]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::log2(dev[1] / dev[2]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("snapshot record of an exact soliton") {
  const GridSpec g{512, 40.0, -20.0};
  const SolitonParams p{0.0, 1.0};
  const auto u = soliton::soliton_field(g, p);
  const auto r = snapshot_record(u, p, FieldState::zeros(g), {0.0, 0.0}, PotentialSpec::zero());
  CHECK(r.P == doctest::Approx(16.0 / 3.0));
  CHECK(r.h1_norm_v == 0.0);
  CHECK(r.energy_E == 0.0);
  CHECK(r.virial_psi_v2 == 0.0);
}

}
