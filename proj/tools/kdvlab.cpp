// kdvlab: command line front end for runs, comparisons, sweeps, spectra and fits.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "kdv/errors.hpp"
#include "kdv/harness/config.hpp"
#include "kdv/harness/outputs.hpp"
#include "kdv/harness/runs.hpp"
#include "kdv/harness/svg.hpp"

using namespace kdv;
using namespace kdv::harness;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<double> h;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "key = value config file");
  sub->add_option("--out", c.out, "output directory (overrides output.dir)");
  sub->add_option("--h", c.h, "slow scale h (overrides potential.h)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : RunConfig::load(c.config);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (c.h) cfg.potential.h = *c.h;
  cfg.validate();
  return cfg;
}

class Writer {
 public:
  explicit Writer(const RunConfig& cfg) : dir_(cfg.out_dir) {}
  void put(const std::string& name, const std::string& content) {
    write_atomic(dir_ / name, content);
    files_.push_back(name);
  }
  void finish(const std::string& command, const RunConfig& cfg) {
    files_.push_back("manifest.json");
    write_atomic(dir_ / "manifest.json", manifest_json(command, cfg, files_));
    std::printf("wrote %zu files to %s (config %s)\n", files_.size(), dir_.string().c_str(), cfg.hash_hex().c_str());
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

void emit_run(Writer& w, const SimulationArtifacts& run) {
  w.put("snapshots.csv", snapshots_csv(run.sim.snapshots));
  w.put("fits.csv", fits_csv(run.fits));
  w.put("diagnostics.csv", diagnostics_csv(run.diagnostics));
  w.put("waterfall.svg", waterfall_svg(run.sim.snapshots));
}

int cmd_simulate(const Common& c) {
  const auto cfg = resolve(c);
  const auto run = run_simulation(cfg);
  Writer w(cfg);
  emit_run(w, run);
  std::printf("simulate: %zu steps, dt=%.6g, %zu snapshots\n", run.sim.steps, run.sim.dt, run.sim.snapshots.size());
  w.finish("simulate", cfg);
  return 0;
}

int cmd_compare(const Common& c) {
  const auto cfg = resolve(c);
  const auto res = run_compare(cfg);
  Writer w(cfg);
  emit_run(w, res.run);
  w.put("ode.csv", ode_csv(*res.ode));
  w.put("ode.json", ode_json(*res.ode, cfg));
  w.put("overlay.csv", overlay_csv(res.rows));
  w.put("summary.json", summary_json(res.summary));
  Series a_pde{"A_h (PDE fit)", {}, {}, "#1f4e9c"}, a_ode{"A (ODE)", {}, {}, "#c0392b"};
  Series c_pde{"C_h (PDE fit)", {}, {}, "#1f4e9c"}, c_ode{"C (ODE)", {}, {}, "#c0392b"};
  for (const auto& r : res.rows) {
    for (auto* s : {&a_pde, &a_ode, &c_pde, &c_ode}) s->x.push_back(r.T);
    a_pde.y.push_back(r.A_h);
    a_ode.y.push_back(r.A);
    c_pde.y.push_back(r.C_h);
    c_ode.y.push_back(r.C);
  }
  const Series as[] = {a_pde, a_ode}, cs[] = {c_pde, c_ode};
  w.put("overlay_A.svg", line_plot_svg("position", "T", "A", as));
  w.put("overlay_C.svg", line_plot_svg("scale", "T", "C", cs));
  const auto& s = res.summary;
  std::printf("compare h=%g: sup|A_h-A|=%.4g sup|C_h-C|=%.4g (refit %.4g, %.4g) sup||v||_H1=%.4g T_end=%g\n", s.h,
              s.sup_A, s.sup_C, s.sup_A_refit, s.sup_C_refit, s.sup_v_h1, s.T_end);
  w.finish("compare", cfg);
  return 0;
}

int cmd_converge(const Common& c, bool serial) {
  const auto cfg = resolve(c);
  const auto rep = run_converge(cfg, !serial);
  Writer w(cfg);
  w.put("convergence.json", convergence_json(rep));
  std::string csv = "h,ok,sup_A,sup_C,sup_A_refit,sup_C_refit,sup_v_h1,terminal_A,terminal_C\n";
  Series sc{"sup |C_h - C|", {}, {}, "#1f4e9c"}, sv{"sup ||v||_H1", {}, {}, "#c0392b"};
  for (const auto& e : rep.entries) {
    const auto& s = e.summary;
    csv += format_double(e.h) + "," + (e.ok ? "1" : "0") + "," + format_double(s.sup_A) + "," +
           format_double(s.sup_C) + "," + format_double(s.sup_A_refit) + "," + format_double(s.sup_C_refit) + "," +
           format_double(s.sup_v_h1) + "," + format_double(s.terminal_A) + "," + format_double(s.terminal_C) + "\n";
    if (!e.ok) {
      std::fprintf(stderr, "converge: run h=%g failed: %s\n", e.h, e.error.c_str());
      continue;
    }
    sc.x.push_back(std::log10(e.h));
    sc.y.push_back(std::log10(s.sup_C));
    sv.x.push_back(std::log10(e.h));
    sv.y.push_back(std::log10(s.sup_v_h1));
  }
  w.put("convergence.csv", csv);
  const Series both[] = {sc, sv};
  w.put("convergence.svg", line_plot_svg("h refinement", "log10 h", "log10 error", both));
  if (rep.slopes_valid) {
    std::printf("slope |C_h-C| = %.3f [%.3f, %.3f]\n", rep.scale_error.slope, rep.scale_error.ci_low,
                rep.scale_error.ci_high);
    std::printf("slope ||v||_H1 = %.3f [%.3f, %.3f]\n", rep.residual_norm.slope, rep.residual_norm.ci_low,
                rep.residual_norm.ci_high);
  } else {
    std::printf("fewer than 3 runs survived; no slopes\n");
  }
  w.finish("converge", cfg);
  return rep.slopes_valid ? 0 : 2;
}

int cmd_spectrum(const Common& c, std::optional<std::size_t> N, std::optional<double> L) {
  auto cfg = resolve(c);
  if (N) cfg.spectrum_N = *N;
  if (L) cfg.spectrum_L = *L;
  cfg.validate();
  const auto rep = run_spectrum(cfg.spectrum_N, cfg.spectrum_L);
  Writer w(cfg);
  w.put("spectrum.json", spectrum_json(rep));
  std::fputs(spectrum_table(rep).c_str(), stdout);
  w.finish("spectrum", cfg);
  return 0;
}

int cmd_fit(const Common& c, const std::string& file, long index) {
  const auto cfg = resolve(c);
  const auto snaps = read_snapshots_csv(file);
  const long n = static_cast<long>(snaps.size());
  const long i = index < 0 ? n + index : index;
  if (i < 0 || i >= n) throw ValidationError("fit: snapshot index out of range");
  const auto f = fit_snapshot(snaps[static_cast<std::size_t>(i)], cfg.peak_method, cfg.refit_tol);
  std::printf("snapshot %ld of %ld, S=%.10g\n", i, n, f.field.time);
  std::printf("%-10s %20s %20s\n", "", "peak fit", "orthogonality refit");
  std::printf("%-10s %20.12g %20.12g\n", "position", f.peak.a_tilde, f.refit.params.a);
  std::printf("%-10s %20.12g %20.12g\n", "scale", f.peak.c_tilde, f.refit.params.c);
  std::printf("|a_refit - a_peak| = %.3e  |c_refit - c_peak| = %.3e\n", std::abs(f.refit.params.a - f.peak.a_tilde),
              std::abs(f.refit.params.c - f.peak.c_tilde));
  std::printf("orthogonality residuals %.3e %.3e after %d evaluations\n", f.refit.residuals[0], f.refit.residuals[1],
              f.refit.iters);
  if (c.h) {
    const double h = *c.h;
    std::printf("physical frame (h=%g): a=%.12g c=%.12g\n", h, f.refit.params.a / h, h * f.refit.params.c);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kdvlab: perturbed KdV soliton dynamics"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Common sim_c, cmp_c, conv_c, spec_c, fit_c;
  auto* sim = app.add_subcommand("simulate", "PDE run with fits and diagnostics");
  add_common(sim, sim_c);
  auto* cmp = app.add_subcommand("compare", "PDE against the effective ODE");
  add_common(cmp, cmp_c);
  auto* conv = app.add_subcommand("converge", "compare across converge.h and fit log-log slopes");
  add_common(conv, conv_c);
  bool serial = false;
  conv->add_flag("--serial", serial, "run the sweep sequentially");
  auto* spec = app.add_subcommand("spectrum", "linearized operator checks");
  add_common(spec, spec_c);
  std::optional<std::size_t> specN;
  std::optional<double> specL;
  spec->add_option("--N", specN, "grid points (overrides spectrum.N)");
  spec->add_option("--L", specL, "box length (overrides spectrum.L)");
  auto* fitc = app.add_subcommand("fit", "peak fit and orthogonality refit of one snapshot");
  add_common(fitc, fit_c);
  std::string fit_file;
  long fit_index = -1;
  fitc->add_option("snapshots", fit_file, "snapshot CSV")->required();
  fitc->add_option("--index", fit_index, "snapshot row, negative counts from the end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*sim) return cmd_simulate(sim_c);
    if (*cmp) return cmd_compare(cmp_c);
    if (*conv) return cmd_converge(conv_c, serial);
    if (*spec) return cmd_spectrum(spec_c, specN, specL);
    if (*fitc) return cmd_fit(fit_c, fit_file, fit_index);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
