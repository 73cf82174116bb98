#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdv/fitting.hpp"
#include "kdv/grid.hpp"
#include "kdv/potential.hpp"
#include "kdv/spectral_pde.hpp"

namespace kdv::harness {

/// Flat "section.key = value" text, one entry per line, '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
std::string format_key_values(const KeyValues& kv);

/// Everything a run needs. Defaults reproduce the reference setup
/// b0 = 8 sin X, A0 = 2.5, C0 = 1, K = 1, h = 0.2.
struct RunConfig {
  PotentialSpec potential = PotentialSpec::sinusoidal(8.0, 0.2);
  double K = 1.0;  // slow-time horizon T in [0, K]

  double A0 = 2.5;
  double C0 = 1.0;

  std::size_t N = 1024;
  double L = 8.0 * 3.14159265358979323846;
  std::optional<double> origin;  // auto: A0 - L/2

  std::optional<double> dt;  // auto: 2.5e-5 h^2 (1024 / N)
  bool dealias = true;
  int contour_points = 32;

  double eps = 0.0;  // 0 selects 0.5 min(c, 1)
  double A_scale = 10.0;
  int snapshot_stride = 0;  // 0 picks a stride giving about 100 snapshots

  double delta = 0.25;
  double ode_tol = 1e-10;

  fit::PeakMethod peak_method = fit::PeakMethod::quadratic;
  double refit_tol = 1e-10;

  std::optional<double> S_end;  // auto: K h^2

  std::vector<double> sweep_h = {0.3, 0.25, 0.2, 0.15, 0.1};

  std::size_t spectrum_N = 512;
  double spectrum_L = 40.0;

  std::string out_dir = "out";

  /// Throws ValidationError naming the first offending key.
  void validate() const;

  double h() const { return potential.h; }
  GridSpec grid() const;
  double resolved_S_end() const;
  double resolved_dt() const;
  spectral::StepperConfig stepper() const;

  KeyValues to_key_values() const;
  /// Unknown keys and malformed values are validation errors.
  static RunConfig from_key_values(const KeyValues& kv);
  static RunConfig load(const std::string& path);
  std::string to_text() const { return format_key_values(to_key_values()); }

  /// FNV-1a over the canonical text, excluding output.dir.
  std::uint64_t hash() const;
  std::string hash_hex() const;
};

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace kdv::harness
