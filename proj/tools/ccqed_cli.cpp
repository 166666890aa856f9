#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "ccqed/config.hpp"
#include "ccqed/errors.hpp"
#include "ccqed/lindblad.hpp"
#include "ccqed/model.hpp"
#include "ccqed/sweep.hpp"

using namespace ccqed;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;
constexpr int kExitOutput = 3;

struct Settings {
  std::string config_path;
  std::map<std::string, std::string> flags;
};

void add_setting_flags(CLI::App* cmd, Settings& s) {
  cmd->add_option("-c,--config", s.config_path, "key = value file; flags override it");
  for (const std::string& key : config_keys()) cmd->add_option("--" + key, s.flags[key], "config key " + key);
}

std::vector<ConfigEntry> collect(const Settings& s) {
  std::vector<ConfigEntry> entries;
  if (!s.config_path.empty()) entries = read_config_file(s.config_path);
  for (const std::string& key : config_keys()) {
    const auto it = s.flags.find(key);
    if (it == s.flags.end() || it->second.empty()) continue;
    entries.push_back(ConfigEntry{key, it->second, "--" + key, 0, 1, 1});
  }
  return entries;
}

// File values first, then flags (later entries win).
SweepSpec build_spec(const Settings& s, const std::string& preset_name) {
  const std::vector<ConfigEntry> entries = collect(s);
  SweepSpec spec;
  if (!preset_name.empty()) spec = preset(preset_name, config_n(entries).value_or(100));
  apply_config(entries, spec);
  spec.validate();
  return spec;
}

void report_errors(const std::vector<SweepRow>& rows, const SweepSpec& spec) {
  const std::vector<Curve> curves = spec.effective_curves();
  for (const SweepRow& row : rows)
    for (std::size_t c = 0; c < row.curves.size(); ++c)
      for (std::size_t k = 0; k < row.curves[c].solvers.size(); ++k) {
        const SolverResult& r = row.curves[c].solvers[k];
        if (r.error_kind.empty()) continue;
        std::fprintf(stderr, "%s = %.12g%s%s %s: %s\n", std::string(to_string(spec.variable)).c_str(), row.value,
                     curves[c].label.empty() ? "" : " curve ", curves[c].label.c_str(),
                     spec.solvers[k].name().c_str(), r.error.c_str());
      }
}

int run_and_emit(const SweepSpec& spec) {
  const std::vector<SweepRow> rows = run_sweep(spec);
  report_errors(rows, spec);
  emit(spec, rows);
  return all_failed(rows) ? kExitSolver : kExitOk;
}

int print_rates(const SweepSpec& spec, const std::string& dump_path, bool gamma0) {
  const EffectiveModel m = build_effective_model(spec.base);
  auto line = [](const char* name, double v) { std::printf("%-22s %.12g\n", name, v + 0.0); };
  line("n", m.n);
  line("delta_n", m.delta_n);
  line("alpha_re", m.alpha.real());
  line("alpha_im", m.alpha.imag());
  line("delta_c_shift", m.delta_c_shift);
  line("n_delta_c", m.n * m.delta_c_shift);
  line("gamma_c", m.gamma_c);
  line("n_gamma_c", m.n * m.gamma_c);
  line("gamma_s", m.gamma_s);
  line("g_eff_re", m.g_eff.real());
  line("g_eff_im", m.g_eff.imag());
  line("g_eff_sq", m.g_eff_sq);
  line("big_gamma", m.big_gamma);
  line("gamma0", m.gamma0);
  line("bar_delta_n", m.bar_delta_n);
  line("bar_delta", m.bar_delta);
  line("bar_omega_re", m.bar_omega.real());
  line("bar_omega_im", m.bar_omega.imag());
  line("tilde_omega_re", m.tilde_omega.real());
  line("tilde_omega_im", m.tilde_omega.imag());
  if (m.series) {
    line("p", m.series->p);
    line("theta_re", m.series->theta.real());
    line("theta_im", m.series->theta.imag());
  }
  std::printf("%-22s %s\n", "branch", std::string(to_string(m.branch)).c_str());
  for (const std::string& w : m.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  if (!dump_path.empty()) {
    const NumericSolution s = solve_numeric(m, gamma0, spec.numeric);
    std::ofstream out(dump_path);
    if (!out) throw OutputError("cannot open '" + dump_path + "' for writing");
    write_density_matrix(out, s.rho.entries);
    if (!out) throw OutputError("failed writing '" + dump_path + "'");
    std::fprintf(stderr, "steady state D = %d written to %s (%s)\n", s.dim, dump_path.c_str(),
                 s.physicality.describe().c_str());
  }
  return kExitOk;
}

int run_validate() {
  bool ok = true;
  for (const FullModelCheck& c : run_full_model_checks()) {
    std::printf("%s %s value=%.6g expected=%.6g tolerance=%.3g (%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                c.value, c.expected, c.tolerance, c.detail.c_str());
    ok = ok && c.passed;
  }
  return ok ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady states of a driven emitter ensemble in a leaky cavity"};
  app.require_subcommand(1);

  Settings sweep_settings, preset_settings, rates_settings;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter and write CSV or JSON lines");
  add_setting_flags(sweep_cmd, sweep_settings);

  std::string preset_name;
  CLI::App* preset_cmd = app.add_subcommand("preset", "run a figure preset (fig1a fig1b fig2 fig3a fig3b fig4)");
  preset_cmd->add_option("name", preset_name, "preset name")->required();
  add_setting_flags(preset_cmd, preset_settings);

  std::string dump_path;
  bool dump_gamma0 = false;
  CLI::App* rates_cmd = app.add_subcommand("rates", "print the effective-model quantities for one parameter set");
  add_setting_flags(rates_cmd, rates_settings);
  rates_cmd->add_option("--dump-rho", dump_path, "also solve numerically and write rho (re,im pairs)");
  rates_cmd->add_flag("--gamma0", dump_gamma0, "include the Gamma_0 terms in the dumped steady state");

  app.add_subcommand("validate", "run the spin + cavity adiabatic-elimination checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sweep_cmd) return run_and_emit(build_spec(sweep_settings, ""));
    if (*preset_cmd) return run_and_emit(build_spec(preset_settings, preset_name));
    if (*rates_cmd) return print_rates(build_spec(rates_settings, ""), dump_path, dump_gamma0);
    return run_validate();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const OutputError& e) {
    std::fprintf(stderr, "output error: %s\n", e.what());
    return kExitOutput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
}
