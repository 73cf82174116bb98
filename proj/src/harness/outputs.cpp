#include "kdv/harness/outputs.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kdv/errors.hpp"

namespace kdv::harness {

using nlohmann::ordered_json;

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_double(x);
}

// JSON has no inf/nan; store them as null.
ordered_json jnum(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

double parse_field(const std::string& tok, int line, const char* what) {
  double x = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, x);
  if (tok.empty() || ec != std::errc() || p != end || !std::isfinite(x))
    throw ValidationError("snapshot file line " + std::to_string(line) + ": bad " + what + " '" + tok + "'");
  return x;
}

const char* edge_name(ode::ExitEdge e) {
  switch (e) {
    case ode::ExitEdge::lower: return "lower";
    case ode::ExitEdge::upper: return "upper";
    default: return "none";
  }
}

ordered_json summary_object(const CompareSummary& s) {
  return ordered_json{{"h", s.h},
                      {"sup_A", s.sup_A},
                      {"sup_C", s.sup_C},
                      {"sup_A_refit", s.sup_A_refit},
                      {"sup_C_refit", s.sup_C_refit},
                      {"terminal_A", s.terminal_A},
                      {"terminal_C", s.terminal_C},
                      {"sup_v_h1", s.sup_v_h1},
                      {"terminal_v_h1", s.terminal_v_h1},
                      {"sup_v_weighted", s.sup_v_weighted},
                      {"max_orth", s.max_orth},
                      {"T_end", s.T_end},
                      {"T_star", jnum(s.T_star)},
                      {"rows", s.rows}};
}

ordered_json slope_object(const SlopeFit& f) {
  return ordered_json{{"slope", f.slope}, {"intercept", f.intercept}, {"ci95", {f.ci_low, f.ci_high}}, {"n", f.n}};
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << content;
    if (!out) throw ValidationError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string snapshots_csv(std::span<const FieldState> snapshots) {
  std::string out = "S,N,L,origin";
  const std::size_t n = snapshots.empty() ? 0 : snapshots.front().grid.N;
  for (std::size_t j = 0; j < n; ++j) out += ",V" + std::to_string(j);
  out += "\n";
  for (const auto& s : snapshots) {
    out += num(s.time) + "," + std::to_string(s.grid.N) + "," + num(s.grid.L) + "," + num(s.grid.origin);
    for (double v : s.values) out += "," + num(v);
    out += "\n";
  }
  return out;
}

std::vector<FieldState> parse_snapshots_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("S,N,L,origin", 0) != 0)
    throw ValidationError("snapshot file: missing 'S,N,L,origin' header");
  std::vector<FieldState> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> tok;
    std::stringstream ls(line);
    std::string t;
    while (std::getline(ls, t, ',')) tok.push_back(t);
    if (tok.size() < 4) throw ValidationError("snapshot file line " + std::to_string(lineno) + ": too few fields");
    FieldState f;
    f.time = parse_field(tok[0], lineno, "S");
    const double N = parse_field(tok[1], lineno, "N");
    f.grid.L = parse_field(tok[2], lineno, "L");
    f.grid.origin = parse_field(tok[3], lineno, "origin");
    if (N < 16 || N != std::floor(N)) throw ValidationError("snapshot file line " + std::to_string(lineno) + ": bad N");
    f.grid.N = static_cast<std::size_t>(N);
    f.grid.validate();
    if (tok.size() != 4 + f.grid.N)
      throw ValidationError("snapshot file line " + std::to_string(lineno) + ": expected " +
                            std::to_string(f.grid.N) + " values, found " + std::to_string(tok.size() - 4));
    f.values.reserve(f.grid.N);
    for (std::size_t j = 0; j < f.grid.N; ++j) f.values.push_back(parse_field(tok[4 + j], lineno, "value"));
    out.push_back(std::move(f));
  }
  if (out.empty()) throw ValidationError("snapshot file: no snapshots");
  return out;
}

std::vector<FieldState> read_snapshots_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open snapshot file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_snapshots_csv(ss.str());
}

std::string fits_csv(std::span<const FitRow> rows) {
  std::string out = "S,T,A_tilde,C_tilde,A_h,C_h,a_refit,c_refit,orth1,orth2,refit_iters\n";
  for (const auto& r : rows)
    out += num(r.S) + "," + num(r.T) + "," + num(r.A_tilde) + "," + num(r.C_tilde) + "," + num(r.A_h) + "," +
           num(r.C_h) + "," + num(r.a_refit) + "," + num(r.c_refit) + "," + num(r.orth1) + "," + num(r.orth2) +
           "," + std::to_string(r.refit_iters) + "\n";
  return out;
}

std::string diagnostics_header() {
  return "time,P,H,a,c,h1_norm_v,weighted_h1_v,orth1,orth2,energy_E,virial_psi_v2,res_a,res_c,"
         "momentum_law_residual";
}

std::string diagnostics_csv(std::span<const diag::DiagnosticsRecord> rows) {
  std::string out = diagnostics_header() + "\n";
  for (const auto& r : rows) {
    const double f[] = {r.time,    r.P,     r.H,        r.a,          r.c,     r.h1_norm_v, r.weighted_h1_v,
                        r.orth1,   r.orth2, r.energy_E, r.virial_psi_v2, r.res_a, r.res_c, r.momentum_law_residual};
    for (std::size_t i = 0; i < std::size(f); ++i) out += (i ? "," : "") + num(f[i]);
    out += "\n";
  }
  return out;
}

std::string ode_csv(const ode::ODETrajectory& traj) {
  std::string out = "tau,A,C\n";
  for (const auto& s : traj.samples()) out += num(s.tau) + "," + num(s.A) + "," + num(s.C) + "\n";
  return out;
}

std::string ode_json(const ode::ODETrajectory& traj, const RunConfig& cfg) {
  ordered_json j{{"A0", cfg.A0},
                 {"C0", cfg.C0},
                 {"delta", traj.delta()},
                 {"tol", cfg.ode_tol},
                 {"tau_begin", traj.tau_begin()},
                 {"tau_end", traj.tau_end()},
                 {"T_star", jnum(traj.T_star())},
                 {"exit_edge", edge_name(traj.exit_edge())},
                 {"accepted_steps", traj.accepted_steps()},
                 {"rejected_steps", traj.rejected_steps()}};
  return j.dump(2) + "\n";
}

std::string overlay_csv(std::span<const CompareRow> rows) {
  std::string out = "T,A_h,A,C_h,C,A_refit,C_refit\n";
  for (const auto& r : rows)
    out += num(r.T) + "," + num(r.A_h) + "," + num(r.A) + "," + num(r.C_h) + "," + num(r.C) + "," + num(r.A_refit) +
           "," + num(r.C_refit) + "\n";
  return out;
}

std::string summary_json(const CompareSummary& s) { return summary_object(s).dump(2) + "\n"; }

std::string convergence_json(const ConvergenceReport& rep) {
  ordered_json runs = ordered_json::array();
  for (const auto& e : rep.entries) {
    ordered_json r{{"h", e.h}, {"ok", e.ok}};
    if (e.ok) r["errors"] = summary_object(e.summary);
    else r["error"] = e.error;
    runs.push_back(r);
  }
  ordered_json j{{"runs", runs}, {"slopes_valid", rep.slopes_valid}};
  if (rep.slopes_valid) {
    j["slopes"] = {{"scale_error", slope_object(rep.scale_error)},
                   {"position_error", slope_object(rep.position_error)},
                   {"refit_scale_error", slope_object(rep.refit_scale_error)},
                   {"residual_norm_h1", slope_object(rep.residual_norm)}};
  }
  return j.dump(2) + "\n";
}

std::string spectrum_json(const SpectrumReport& rep) {
  ordered_json constants = ordered_json::array();
  for (const auto& c : rep.constants)
    constants.push_back({{"name", c.name},
                         {"computed", c.computed},
                         {"closed_form", jnum(c.closed_form)},
                         {"reference", c.reference},
                         {"tolerance", c.tolerance},
                         {"pass", c.pass}});
  ordered_json checks = ordered_json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name},
                      {"value", jnum(c.value)},
                      {"expected", c.expected},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass}});
  ordered_json j{{"grid", {{"N", rep.N}, {"L", rep.L}}},
                 {"eigenvalues", rep.eigenvalues},
                 {"continuum_edge", jnum(rep.continuum_edge)},
                 {"edge_degraded", rep.edge_degraded},
                 {"bound_state_error", rep.bound_state_error},
                 {"f1_error", rep.f1_error},
                 {"f0_error", rep.f0_error},
                 {"constants", constants},
                 {"minima",
                  {{"unconstrained", rep.min_unconstrained},
                   {"L2_constrained", rep.min_L2},
                   {"H1_constrained", rep.min_H1},
                   {"mm", rep.mm_min},
                   {"mm_doubled", rep.mm_min_doubled},
                   {"mm_unconstrained", rep.mm_unconstrained}}},
                 {"checks", checks},
                 {"all_pass", rep.all_pass()}};
  return j.dump(2) + "\n";
}

std::string spectrum_table(const SpectrumReport& rep) {
  std::ostringstream out;
  out << "grid N=" << rep.N << " L=" << rep.L << (rep.edge_degraded ? "  [degraded continuum edge]" : "") << "\n";
  char buf[160];
  for (const auto& c : rep.checks) {
    std::snprintf(buf, sizeof buf, "%-4s %-28s value=% .10g expected=% .8g tol=%.1e\n", c.pass ? "PASS" : "FAIL",
                  c.name.c_str(), c.value, c.expected, c.tolerance);
    out << buf;
  }
  return out.str();
}

std::string manifest_json(const std::string& command, const RunConfig& cfg, std::span<const std::string> files) {
  ordered_json config;
  for (const auto& [k, v] : cfg.to_key_values()) config[k] = v;
  ordered_json j{{"command", command},
                 {"config_hash", cfg.hash_hex()},
                 {"config", config},
                 {"files", std::vector<std::string>(files.begin(), files.end())}};
  return j.dump(2) + "\n";
}

}  // namespace kdv::harness
