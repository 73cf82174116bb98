#include <doctest.h>

#include <cmath>
#include <random>

#include "kdv/errors.hpp"
#include "kdv/operator_lab.hpp"

using namespace kdv;
using namespace kdv::oplab;

namespace {

const GridSpec kLine = default_line_grid(256);

std::vector<double> apply_op(const OperatorMatrix& op, const std::vector<double>& f) {
  const Eigen::VectorXd y = op.matrix * Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
  return {y.data(), y.data() + y.size()};
}

double sup(const std::vector<double>& f) {
  double m = 0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

// random localized field with the two orthogonality conditions removed
std::vector<double> projected_draw(const GridSpec& g, const SolitonParams& p, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> f(g.N, 0.0), eta(g.N), xeta(g.N);
  for (int m = 0; m < 4; ++m) {
    const double amp = nd(rng), x0 = p.a + 3 * nd(rng), s = 0.5 + std::abs(nd(rng));
    for (std::size_t j = 0; j < g.N; ++j) {
      const double d = g.offset(g.x(j), x0);
      f[j] += amp * std::exp(-d * d / (s * s));
    }
  }
  for (std::size_t j = 0; j < g.N; ++j) {
    const double d = g.offset(g.x(j), p.a);
    eta[j] = soliton::eta(g.x(j), p);
    xeta[j] = d * eta[j];
  }
  // Gram-Schmidt against eta and (x-a) eta (orthogonal to each other by parity)
  for (const auto* q : {&eta, &xeta}) {
    const double k = inner(g, f, *q) / inner(g, *q, *q);
    for (std::size_t j = 0; j < g.N; ++j) f[j] -= k * (*q)[j];
  }
  return f;
}

}  // namespace

TEST_SUITE("operator_lab") {

TEST_CASE("kernel and ground state of L") {
  const auto L = build_operator(OperatorKind::L, kLine);
  std::vector<double> dth(kLine.N), s3(kLine.N);
  for (std::size_t j = 0; j < kLine.N; ++j) {
    const double y = kLine.x(j);
    dth[j] = soliton::theta(y, 1);
    s3[j] = std::pow(1.0 / std::cosh(y), 3);
  }
  CHECK(sup(apply_op(L, dth)) < 1e-8);
  const auto Ls = apply_op(L, s3);
  for (std::size_t j = 0; j < kLine.N; ++j) CHECK(Ls[j] == doctest::Approx(-5.0 * s3[j]).scale(1.0).epsilon(1e-9));
}

TEST_CASE("K is L rescaled to (a, c)") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> ua(-2.0, 2.0), uc(0.6, 1.6);
  const auto lam_L = eigenpairs(build_operator(OperatorKind::L, kLine), 3);
  for (int k = 0; k < 5; ++k) {
    const SolitonParams p{ua(rng), uc(rng)};
    const GridSpec g{256, 40.0 / p.c, p.a - 20.0 / p.c};
    const auto lam_K = eigenpairs(build_operator(OperatorKind::K, g, p), 3);
    for (int i = 0; i < 3; ++i) CHECK(lam_K[i].value == doctest::Approx(p.c * p.c * lam_L[i].value).scale(1.0).epsilon(1e-8));
  }
}

TEST_CASE("eigenvalues, orthonormality and parity") {
  const GridSpec g = default_line_grid(512);
  const auto ev = eigenpairs(build_operator(OperatorKind::L, g), 6);
  CHECK(ev[0].value == doctest::Approx(-5.0).epsilon(1e-10));
  CHECK(std::abs(ev[1].value) < 1e-8);
  CHECK(ev[2].value == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(ev[3].value > 4.0 - 1e-3);
  for (std::size_t i = 0; i < ev.size(); ++i)
    for (std::size_t k = 0; k < ev.size(); ++k)
      CHECK(std::abs(inner(g, ev[i].vector, ev[k].vector) - (i == k ? 1.0 : 0.0)) < 1e-8);
  // ground state even and positive at the center, kernel odd
  CHECK(ev[0].vector[g.N / 2] > 0);
  CHECK(ev[1].vector[g.N / 2 + 1] > ev[1].vector[g.N / 2 - 1]);
  for (std::size_t j = 1; j < g.N; ++j) CHECK(ev[1].vector[j] == doctest::Approx(-ev[1].vector[g.N - j]).scale(1.0));
}

TEST_CASE("spectral constants") {
  for (const auto& c : constants_check()) {
    INFO(c.name);
    CHECK(c.pass);
    CHECK(c.computed == doctest::Approx(c.closed_form).epsilon(1e-8));
  }
}

TEST_CASE("constrained minima grow as constraints are added") {
  const auto L = build_operator(OperatorKind::L, kLine);
  std::vector<double> th(kLine.N), yth(kLine.N);
  for (std::size_t j = 0; j < kLine.N; ++j) {
    th[j] = soliton::theta(kLine.x(j));
    yth[j] = kLine.x(j) * th[j];
  }
  const double m0 = constrained_min_rayleigh(L, {}, NormKind::L2);
  const double m1 = constrained_min_rayleigh(L, {th}, NormKind::L2);
  const double m2 = constrained_min_rayleigh(L, {th, yth}, NormKind::L2);
  CHECK(m0 == doctest::Approx(-5.0));
  CHECK(m0 <= m1 + 1e-12);
  CHECK(m1 <= m2 + 1e-12);
  CHECK(m2 >= 2.0);
  CHECK(m2 <= 3.0);
  const double h1 = constrained_min_rayleigh(L, {th, yth}, NormKind::H1);
  CHECK(h1 >= 2.0 / 11.0);
  CHECK(h1 <= m2);
}

TEST_CASE("degenerate constraints are rejected") {
  const auto L = build_operator(OperatorKind::L, kLine);
  std::vector<double> th(kLine.N);
  for (std::size_t j = 0; j < kLine.N; ++j) th[j] = soliton::theta(kLine.x(j));
  auto th2 = th;
  for (auto& x : th2) x *= 2.0;
  CHECK_THROWS_AS(constrained_min_rayleigh(L, {th, th2}, NormKind::L2), ValidationError);
}

TEST_CASE("virial form: positive, stable under refinement, negative without constraints") {
  const double m = mm_positivity_check(default_line_grid(256));
  const double m2 = mm_positivity_check(default_line_grid(512));
  CHECK(m > 0.0);
  CHECK(std::abs(m - m2) / m2 < 1e-3);
  const auto g = default_line_grid(256);
  CHECK(constrained_min_rayleigh(mm_form_matrix(g), g, {}, NormKind::H1) < 0.0);
}

TEST_CASE("rank-one term drops out on odd functions") {
  const auto g = default_line_grid(256);
  std::vector<double> yth(g.N);
  for (std::size_t j = 0; j < g.N; ++j) yth[j] = g.x(j) * soliton::theta(g.x(j));
  const Eigen::MatrixXd odd = parity_basis(g, true);
  const auto op = build_operator(OperatorKind::MM_L, g);
  const double full = constrained_min_rayleigh(mm_form_matrix(g), g, {yth}, NormKind::H1, &odd);
  const double base = constrained_min_rayleigh(op, {yth}, NormKind::H1, &odd);
  CHECK(full == doctest::Approx(1.5 * base).epsilon(1e-8));
}

TEST_CASE("corollary form: zero field, positivity on projected draws, two evaluation paths") {
  const SolitonParams p{0.5, 1.0};
  const GridSpec g{256, 60.0, -29.5};
  const auto w = diag::VirialWeight::tabulate(g, p.a, 10.0);
  const auto z = corollary_mm_form(FieldState::zeros(g), p, w);
  CHECK(z.rhs == 0.0);
  CHECK(z.lhs == 0.0);

  std::mt19937 rng(5);
  double worst = 1e300;
  for (int k = 0; k < 100; ++k) {
    const FieldState v{g, projected_draw(g, p, rng), 0.0};
    const auto f = corollary_mm_form(v, p, w);
    worst = std::min(worst, f.rhs / f.lhs);
    if (k < 5) {
      const auto fm = corollary_mm_form_matrix(v, p, w);
      CHECK(std::abs(f.rhs - fm.rhs) < 1e-9 * std::max(1.0, std::abs(f.rhs)));
      CHECK(std::abs(f.lhs - fm.lhs) < 1e-9 * std::max(1.0, f.lhs));
    }
  }
  MESSAGE("worst rhs/lhs ratio over draws: " << worst);
  CHECK(worst > 0.0);

  std::vector<double> eta(g.N);
  for (std::size_t j = 0; j < g.N; ++j) eta[j] = soliton::eta(g.x(j), p);
  CHECK_THROWS_AS(corollary_mm_form(FieldState{g, eta, 0.0}, p, w), ValidationError);
}

}
