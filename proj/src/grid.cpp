#include "kdv/grid.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "kdv/errors.hpp"

namespace kdv {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are built once per size and shared.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~PlanPair() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

std::mutex plan_mutex;

const PlanPair& plans_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return *it->second;
  auto p = std::make_unique<PlanPair>();
  std::vector<double> re(n);
  std::vector<cplx> spec(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p->forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), re.data(),
                                    reinterpret_cast<fftw_complex*>(spec.data()), flags);
  p->backward = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                     reinterpret_cast<fftw_complex*>(spec.data()), re.data(),
                                     flags | FFTW_DESTROY_INPUT);
  if (!p->forward || !p->backward) throw NumericalError("FFTW plan creation failed");
  return *cache.emplace(n, std::move(p)).first->second;
}

}  // namespace

void GridSpec::validate() const {
  if (N < 16 || !std::has_single_bit(N))
    throw ValidationError("grid N must be a power of two >= 16, got " + std::to_string(N));
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("grid L must be positive");
  if (!std::isfinite(origin)) throw ValidationError("grid origin must be finite");
}

std::vector<double> GridSpec::points() const {
  std::vector<double> xs(N);
  for (std::size_t j = 0; j < N; ++j) xs[j] = x(j);
  return xs;
}

double GridSpec::wavenumber(std::size_t j) const {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / L;
}

double GridSpec::offset(double x, double a) const {
  double d = std::fmod(x - a + 0.5 * L, L);
  if (d < 0) d += L;
  return d - 0.5 * L;
}

std::vector<cplx> rfft(std::span<const double> f) {
  const std::size_t n = f.size();
  const auto& p = plans_for(n);
  std::vector<double> in(f.begin(), f.end());
  std::vector<cplx> out(n / 2 + 1);
  fftw_execute_dft_r2c(p.forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> irfft(std::span<const cplx> fhat, std::size_t n) {
  if (fhat.size() != n / 2 + 1) throw ValidationError("irfft: spectrum size mismatch");
  const auto& p = plans_for(n);
  std::vector<cplx> in(fhat.begin(), fhat.end());
  std::vector<double> out(n);
  fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<double> spectral_derivative(const GridSpec& g, std::span<const double> f, int order) {
  if (order < 0) throw ValidationError("derivative order must be non-negative");
  auto fhat = rfft(f);
  const std::size_t nyq = g.N / 2;
  for (std::size_t j = 0; j < fhat.size(); ++j) {
    const cplx ik(0.0, g.wavenumber(j));
    cplx factor = 1.0;
    for (int m = 0; m < order; ++m) factor *= ik;
    if (j == nyq && order % 2 == 1) factor = 0.0;
    fhat[j] *= factor;
  }
  return irfft(fhat, g.N);
}

double integrate(const GridSpec& g, std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * g.dx();
}

double inner(const GridSpec& g, std::span<const double> f, std::span<const double> w) {
  if (f.size() != w.size()) throw ValidationError("inner: size mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * w[j];
  return s * g.dx();
}

double fourier_l2_squared(const GridSpec& g, std::span<const double> f) {
  const auto fhat = rfft(f);
  const std::size_t n = g.N;
  double s = std::norm(fhat[0]) + std::norm(fhat[n / 2]);
  for (std::size_t j = 1; j < n / 2; ++j) s += 2.0 * std::norm(fhat[j]);
  return s * g.dx() / static_cast<double>(n);
}

void dealias(std::span<cplx> fhat) {
  const std::size_t n = 2 * (fhat.size() - 1);
  const std::size_t cutoff = n / 3;
  for (std::size_t j = cutoff; j < fhat.size(); ++j) fhat[j] = 0.0;
}

}  // namespace kdv
