#include "kdv/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kdv/errors.hpp"

namespace kdv::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x))
    throw ValidationError("config: " + key + " expects a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ValidationError("config: " + key + " expects an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ValidationError("config: " + key + " expects true/false, got '" + v + "'");
}

std::optional<double> to_auto_double(const std::string& key, const std::string& v) {
  if (v == "auto") return std::nullopt;
  return to_double(key, v);
}

std::string auto_double(const std::optional<double>& x) { return x ? format_double(*x) : "auto"; }

std::string method_name(fit::PeakMethod m) { return m == fit::PeakMethod::fourier ? "fourier" : "quadratic"; }

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, p);
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ValidationError("config: duplicate key " + key);
    kv[key] = value;
  }
  return kv;
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

GridSpec RunConfig::grid() const { return GridSpec{N, L, origin ? *origin : A0 - 0.5 * L}; }

double RunConfig::resolved_S_end() const { return S_end ? *S_end : K * h() * h(); }

double RunConfig::resolved_dt() const {
  return dt ? *dt : 2.5e-5 * h() * h() * (1024.0 / static_cast<double>(N));
}

spectral::StepperConfig RunConfig::stepper() const {
  spectral::StepperConfig s;
  s.dealias = dealias;
  s.contour_points = contour_points;
  const double S = resolved_S_end();
  const double dt0 = resolved_dt();
  if (S <= 0.0) {
    s.dt = dt0;
    return s;
  }
  // whole number of steps, a multiple of the stride, so snapshots are uniform
  auto n = static_cast<long long>(std::ceil(S / dt0 - 1e-9));
  long long stride = snapshot_stride > 0 ? snapshot_stride : std::max<long long>(1, n / 100);
  n = ((n + stride - 1) / stride) * stride;
  s.dt = S / static_cast<double>(n);
  s.snapshot_stride = static_cast<int>(stride);
  return s;
}

void RunConfig::validate() const {
  auto need = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ValidationError(std::string("config: ") + key + " " + what);
  };
  need(potential.h > 0.0 && potential.h <= 1.0, "potential.h", "must lie in (0, 1]");
  potential.validate();
  need(K >= 0.0 && std::isfinite(K), "potential.K", "must be >= 0");
  need(std::isfinite(A0), "initial.A0", "must be finite");
  need(delta > 0.0 && delta < 1.0, "ode.delta", "must lie in (0, 1)");
  need(C0 >= delta && C0 <= 1.0 / delta, "initial.C0", "must lie in [delta, 1/delta]");
  grid().validate();
  need(!dt || *dt > 0.0, "stepper.dt", "must be positive or auto");
  need(contour_points >= 16 && contour_points % 2 == 0, "stepper.M", "must be an even integer >= 16");
  need(eps >= 0.0, "diagnostics.eps", "must be >= 0 (0 = auto)");
  need(A_scale > 0.0, "diagnostics.A_scale", "must be positive");
  need(snapshot_stride >= 0, "diagnostics.snapshot_stride", "must be >= 0 (0 = auto)");
  need(ode_tol > 0.0 && ode_tol < 1e-2, "ode.tol", "must lie in (0, 1e-2)");
  need(refit_tol > 0.0, "fit.refit_tol", "must be positive");
  need(!S_end || *S_end >= 0.0, "run.S_end", "must be >= 0 or auto");
  need(sweep_h.size() >= 3, "converge.h", "needs at least 3 values");
  for (double x : sweep_h) need(x > 0.0 && x <= 1.0, "converge.h", "values must lie in (0, 1]");
  need(spectrum_N >= 16 && (spectrum_N & (spectrum_N - 1)) == 0 && spectrum_N <= 2048, "spectrum.N",
       "must be a power of two in [16, 2048]");
  need(spectrum_L > 0.0, "spectrum.L", "must be positive");
  need(!out_dir.empty(), "output.dir", "must not be empty");
}

KeyValues RunConfig::to_key_values() const {
  KeyValues kv;
  kv["potential.family"] = std::string(to_string(potential.family));
  kv["potential.amplitude"] = format_double(potential.amplitude);
  kv["potential.h"] = format_double(potential.h);
  kv["potential.width"] = format_double(potential.width);
  kv["potential.center"] = format_double(potential.center);
  kv["potential.time_dependent"] = potential.time_dependent ? "true" : "false";
  kv["potential.envelope_amplitude"] = format_double(potential.envelope_amplitude);
  kv["potential.envelope_frequency"] = format_double(potential.envelope_frequency);
  kv["potential.K"] = format_double(K);
  kv["initial.A0"] = format_double(A0);
  kv["initial.C0"] = format_double(C0);
  kv["grid.N"] = std::to_string(N);
  kv["grid.L"] = format_double(L);
  kv["grid.origin"] = auto_double(origin);
  kv["stepper.dt"] = auto_double(dt);
  kv["stepper.dealias"] = dealias ? "true" : "false";
  kv["stepper.M"] = std::to_string(contour_points);
  kv["diagnostics.eps"] = format_double(eps);
  kv["diagnostics.A_scale"] = format_double(A_scale);
  kv["diagnostics.snapshot_stride"] = std::to_string(snapshot_stride);
  kv["ode.delta"] = format_double(delta);
  kv["ode.tol"] = format_double(ode_tol);
  kv["fit.method"] = method_name(peak_method);
  kv["fit.refit_tol"] = format_double(refit_tol);
  kv["run.S_end"] = auto_double(S_end);
  std::string hs;
  for (std::size_t i = 0; i < sweep_h.size(); ++i) hs += (i ? "," : "") + format_double(sweep_h[i]);
  kv["converge.h"] = hs;
  kv["spectrum.N"] = std::to_string(spectrum_N);
  kv["spectrum.L"] = format_double(spectrum_L);
  kv["output.dir"] = out_dir;
  return kv;
}

RunConfig RunConfig::from_key_values(const KeyValues& kv) {
  RunConfig c;
  for (const auto& [k, v] : kv) {
    if (k == "potential.family") {
      try {
        c.potential.family = parse_potential_family(v);
      } catch (const std::exception&) {
        throw ValidationError("config: potential.family unknown value '" + v + "'");
      }
    } else if (k == "potential.amplitude") c.potential.amplitude = to_double(k, v);
    else if (k == "potential.h") c.potential.h = to_double(k, v);
    else if (k == "potential.width") c.potential.width = to_double(k, v);
    else if (k == "potential.center") c.potential.center = to_double(k, v);
    else if (k == "potential.time_dependent") c.potential.time_dependent = to_bool(k, v);
    else if (k == "potential.envelope_amplitude") c.potential.envelope_amplitude = to_double(k, v);
    else if (k == "potential.envelope_frequency") c.potential.envelope_frequency = to_double(k, v);
    else if (k == "potential.K") c.K = to_double(k, v);
    else if (k == "initial.A0") c.A0 = to_double(k, v);
    else if (k == "initial.C0") c.C0 = to_double(k, v);
    else if (k == "grid.N") {
      const auto n = to_int(k, v);
      if (n < 1) throw ValidationError("config: grid.N must be positive");
      c.N = static_cast<std::size_t>(n);
    } else if (k == "grid.L") c.L = to_double(k, v);
    else if (k == "grid.origin") c.origin = to_auto_double(k, v);
    else if (k == "stepper.dt") c.dt = to_auto_double(k, v);
    else if (k == "stepper.dealias") c.dealias = to_bool(k, v);
    else if (k == "stepper.M") c.contour_points = static_cast<int>(to_int(k, v));
    else if (k == "diagnostics.eps") c.eps = to_double(k, v);
    else if (k == "diagnostics.A_scale") c.A_scale = to_double(k, v);
    else if (k == "diagnostics.snapshot_stride") c.snapshot_stride = static_cast<int>(to_int(k, v));
    else if (k == "ode.delta") c.delta = to_double(k, v);
    else if (k == "ode.tol") c.ode_tol = to_double(k, v);
    else if (k == "fit.method") {
      if (v == "quadratic") c.peak_method = fit::PeakMethod::quadratic;
      else if (v == "fourier") c.peak_method = fit::PeakMethod::fourier;
      else throw ValidationError("config: fit.method must be quadratic or fourier");
    } else if (k == "fit.refit_tol") c.refit_tol = to_double(k, v);
    else if (k == "run.S_end") c.S_end = to_auto_double(k, v);
    else if (k == "converge.h") {
      c.sweep_h.clear();
      std::istringstream in(v);
      std::string item;
      while (std::getline(in, item, ',')) c.sweep_h.push_back(to_double(k, trim(item)));
    } else if (k == "spectrum.N") {
      const auto n = to_int(k, v);
      if (n < 1) throw ValidationError("config: spectrum.N must be positive");
      c.spectrum_N = static_cast<std::size_t>(n);
    } else if (k == "spectrum.L") c.spectrum_L = to_double(k, v);
    else if (k == "output.dir") c.out_dir = v;
    else throw ValidationError("config: unknown key " + k);
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_key_values(parse_key_values(ss.str()));
}

std::uint64_t RunConfig::hash() const {
  auto kv = to_key_values();
  kv.erase("output.dir");
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : format_key_values(kv)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string RunConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

}  // namespace kdv::harness
