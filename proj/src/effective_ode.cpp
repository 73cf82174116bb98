#include "kdv/effective_ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kdv/errors.hpp"

namespace kdv::ode {

namespace {

using Vec = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer-Norsett-Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

Vec rhs(double tau, const Vec& y, const PotentialSpec& b0) {
  const auto d = ode_rhs(ODEState{y[0], y[1], tau}, b0);
  return {d.dA, d.dC};
}

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec out = y;
  for (const auto& [w, k] : terms)
    for (int i = 0; i < 2; ++i) out[i] += h * w * (*k)[i];
  return out;
}

}  // namespace

Derivative ode_rhs(const ODEState& s, const PotentialSpec& b0) {
  const auto b = b0.slow(s.A, s.tau);
  return {4.0 * s.C * s.C - b.value, s.C * b.d1 / 3.0};
}

double conserved_quantity(const ODEState& s, const PotentialSpec& b0) {
  return s.C * s.C * s.C * b0.slow(s.A, s.tau).value - 12.0 / 5.0 * std::pow(s.C, 5);
}

std::array<double, 2> ODETrajectory::DenseStep::eval(double tau) const {
  const double th = (tau - tau0) / h;
  const double th1 = 1.0 - th;
  Vec y;
  for (int i = 0; i < 2; ++i)
    y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
  return y;
}

ODEState ODETrajectory::at(double tau) const {
  const double lo = std::min(tau_begin(), tau_end());
  const double hi = std::max(tau_begin(), tau_end());
  if (tau < lo - 1e-12 || tau > hi + 1e-12)
    throw ValidationError("ODETrajectory::at: tau outside the integrated interval");
  if (steps_.empty()) return {samples_.front().A, samples_.front().C, tau};
  const bool forward = tau_end() >= tau_begin();
  // steps are stored in integration order; their start times are monotone
  auto it = std::upper_bound(steps_.begin(), steps_.end(), tau, [forward](double t, const DenseStep& s) {
    return forward ? t < s.tau0 : t > s.tau0;
  });
  if (it != steps_.begin()) --it;
  const auto y = it->eval(tau);
  return {y[0], y[1], tau};
}

std::vector<ODETrajectory::Sample> ODETrajectory::resample(std::size_t n) const {
  if (n == 0) throw ValidationError("resample: need n >= 1");
  std::vector<Sample> out;
  out.reserve(n + 1);
  const double t0 = tau_begin(), t1 = tau_end();
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = i == n ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n);
    const auto s = at(t);
    out.push_back({t, s.A, s.C});
  }
  return out;
}

ODETrajectory integrate(const ODEState& init, const PotentialSpec& b0, double delta, double tau_max,
                        double tol) {
  if (!(tol > 0.0)) throw ValidationError("integrate: tol must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("integrate: delta must lie in (0, 1]");
  if (init.C < delta || init.C > 1.0 / delta)
    throw ValidationError("integrate: initial C outside [delta, 1/delta]");
  b0.validate();

  ODETrajectory traj;
  traj.delta_ = delta;
  traj.samples_.push_back({init.tau, init.A, init.C});

  const double span = tau_max - init.tau;
  if (span == 0.0) return traj;
  const double dir = span > 0 ? 1.0 : -1.0;
  const double lo_edge = delta, hi_edge = 1.0 / delta;

  // per-step tolerance is a fraction of tol so the accumulated error stays near tol
  const double local = 0.05 * tol;
  auto err_scale = [local](const Vec& y0, const Vec& y1, int i) {
    return local + local * std::max(std::abs(y0[i]), std::abs(y1[i]));
  };

  double tau = init.tau;
  Vec y{init.A, init.C};
  Vec k1 = rhs(tau, y, b0);

  // initial step from the scale of y and y'
  double h;
  {
    double dn0 = 0, dn1 = 0;
    for (int i = 0; i < 2; ++i) {
      const double sk = local + local * std::abs(y[i]);
      dn0 += (y[i] / sk) * (y[i] / sk);
      dn1 += (k1[i] / sk) * (k1[i] / sk);
    }
    h = (dn0 <= 1e-10 || dn1 <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dn0 / dn1);
    h = std::min(h, std::abs(span));
  }

  const double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
  const double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
  double facold = 1e-4;
  bool last = false;

  while (true) {
    if (std::abs(tau_max - tau) <= std::abs(h) * (1.0 + 1e-12) || std::abs(h) >= std::abs(tau_max - tau)) {
      h = std::abs(tau_max - tau);
      last = true;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(tau))) {
      std::ostringstream msg;
      msg << "effective ODE step-size underflow at tau=" << tau;
      throw NumericalError(msg.str());
    }
    const double hs = dir * h;
    const Vec k2 = rhs(tau + c2 * hs, axpy(y, hs, {{a21, &k1}}), b0);
    const Vec k3 = rhs(tau + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}), b0);
    const Vec k4 = rhs(tau + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), b0);
    const Vec k5 = rhs(tau + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), b0);
    const Vec k6 = rhs(tau + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), b0);
    const Vec y1 = axpy(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const Vec k7 = rhs(tau + hs, y1, b0);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double r = ei / err_scale(y, y1, i);
      err += r * r;
    }
    err = std::sqrt(err / 2.0);
    if (!std::isfinite(err) || !std::isfinite(y1[0]) || !std::isfinite(y1[1]))
      throw NumericalError("effective ODE produced non-finite values");

    const double fac11 = std::pow(err, expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(facc2, std::min(facc1, fac / safe));
    double hnew = h / fac;

    if (err > 1.0) {
      h = h / std::min(facc1, fac11 / safe);
      last = false;
      ++traj.rejected_;
      continue;
    }

    facold = std::max(err, 1e-4);
    ODETrajectory::DenseStep ds;
    ds.tau0 = tau;
    ds.h = hs;
    for (int i = 0; i < 2; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = hs * k1[i] - ydiff;
      ds.r[0][i] = y[i];
      ds.r[1][i] = ydiff;
      ds.r[2][i] = bspl;
      ds.r[3][i] = ydiff - hs * k7[i] - bspl;
      ds.r[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }

    // band-exit event on C - delta and C - 1/delta
    const double tau1 = tau + hs;
    auto exits = [&](double C) { return C < lo_edge || C > hi_edge; };
    if (exits(y1[1])) {
      const ExitEdge edge = y1[1] < lo_edge ? ExitEdge::lower : ExitEdge::upper;
      const double target = edge == ExitEdge::lower ? lo_edge : hi_edge;
      double a = tau, b = tau1;
      for (int it = 0; it < 200 && std::abs(b - a) > 1e-13; ++it) {
        const double m = 0.5 * (a + b);
        const double C = ds.eval(m)[1];
        const bool outside = edge == ExitEdge::lower ? C < target : C > target;
        (outside ? b : a) = m;
      }
      const double tstar = 0.5 * (a + b);
      const auto ystar = ds.eval(tstar);
      traj.steps_.push_back(ds);
      traj.samples_.push_back({tstar, ystar[0], ystar[1]});
      traj.T_star_ = tstar;
      traj.edge_ = edge;
      return traj;
    }

    traj.steps_.push_back(ds);
    traj.samples_.push_back({tau1, y1[0], y1[1]});
    tau = tau1;
    y = y1;
    k1 = k7;
    if (last) break;
    h = hnew;
  }
  return traj;
}

std::vector<PhysicalSample> physical_trajectory(const ODETrajectory& traj, double h) {
  if (!(h > 0.0 && h <= 1.0)) throw ValidationError("physical_trajectory: h must lie in (0, 1]");
  std::vector<PhysicalSample> out;
  out.reserve(traj.samples().size());
  for (const auto& s : traj.samples()) out.push_back({s.tau / h, s.A / h, s.C});
  return out;
}

}  // namespace kdv::ode
