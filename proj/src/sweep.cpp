#include "ccqed/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <thread>
#include <variant>

#include "ccqed/analytic.hpp"
#include "ccqed/errors.hpp"

namespace ccqed {
namespace {

constexpr const char* kObservableFields[] = {"mean_excitation", "g2", "amplitude_re", "amplitude_im", "branch",
                                             "error"};
constexpr const char* kNumericFields[] = {"fock_dim", "min_eigenvalue"};
constexpr const char* kDerivedFields[] = {"n_delta_c", "n_gamma_c", "gamma_s", "g_eff_sq"};

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParameterError*>(&e)) return "ParameterError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
  if (dynamic_cast<const NumericalRangeError*>(&e)) return "NumericalRangeError";
  if (dynamic_cast<const TruncationError*>(&e)) return "TruncationError";
  if (dynamic_cast<const DegenerateSteadyStateError*>(&e)) return "DegenerateSteadyStateError";
  if (dynamic_cast<const SolverError*>(&e)) return "SolverError";
  if (dynamic_cast<const StepSizeError*>(&e)) return "StepSizeError";
  return "Error";
}

SolverResult run_solver(const SolverSpec& solver, const EffectiveModel& model, const NumericControl& control) {
  SolverResult r;
  try {
    switch (solver.kind) {
      case SolverKind::AnalyticAuto: r.observables = analytic_auto(model); break;
      case SolverKind::LinearLimit: r.observables = linear_limit_observables(model); break;
      case SolverKind::Numeric: {
        NumericSolution s = solve_numeric(model, solver.gamma0, control);
        r.fock_dim = s.dim;
        r.min_eigenvalue = s.physicality.min_eigenvalue;
        r.observables = std::move(s.observables);
        break;
      }
    }
  } catch (const std::exception& e) {
    r.error_kind = error_kind(e);
    r.error = e.what();
  }
  return r;
}

CurveResult run_point(const SweepSpec& spec, const Curve& curve, double value) {
  CurveResult c;
  try {
    const EffectiveModel model = build_effective_model(point_params(spec, curve, value));
    c.derived = DerivedRates{model.n * model.delta_c_shift, model.n * model.gamma_c, model.gamma_s, model.g_eff_sq};
    for (const SolverSpec& s : spec.solvers) c.solvers.push_back(run_solver(s, model, spec.numeric));
  } catch (const std::exception& e) {
    c.error_kind = error_kind(e);
    c.error = e.what();
    c.solvers.assign(spec.solvers.size(), SolverResult{{}, 0, {}, c.error_kind, c.error});
  }
  return c;
}

std::string prefix(const Curve& curve) { return curve.label.empty() ? "" : curve.label + "_"; }

// One cell: a number (NaN for missing) or text.
using Cell = std::variant<double, std::string>;

std::vector<Cell> row_cells(const SweepSpec& spec, const SweepRow& row) {
  const double nan = std::nan("");
  std::vector<Cell> cells{row.value};
  for (const CurveResult& c : row.curves) {
    if (c.derived)
      cells.insert(cells.end(), {c.derived->n_delta_c, c.derived->n_gamma_c, c.derived->gamma_s, c.derived->g_eff_sq});
    else
      cells.insert(cells.end(), {nan, nan, nan, nan});
    for (std::size_t k = 0; k < spec.solvers.size(); ++k) {
      const SolverResult& r = c.solvers[k];
      if (r.observables) {
        const Observables& o = *r.observables;
        cells.insert(cells.end(), {o.mean_excitation, o.g2.value_or(nan), o.amplitude.real(), o.amplitude.imag(),
                                   std::string(to_string(o.branch)), r.error_kind});
      } else {
        cells.insert(cells.end(), {nan, nan, nan, nan, std::string(), r.error_kind});
      }
      if (spec.solvers[k].kind == SolverKind::Numeric) {
        cells.emplace_back(r.fock_dim > 0 ? static_cast<double>(r.fock_dim) : nan);
        cells.emplace_back(r.min_eigenvalue.value_or(nan));
      }
    }
  }
  return cells;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string_view to_string(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::DeltaC: return "delta_c";
    case SweepVariable::DeltaPhi: return "delta_phi";
    case SweepVariable::Eta: return "eta";
    case SweepVariable::N: return "n";
  }
  return "unknown";
}

std::string SolverSpec::name() const {
  switch (kind) {
    case SolverKind::AnalyticAuto: return "analytic";
    case SolverKind::LinearLimit: return "linear";
    case SolverKind::Numeric: return gamma0 ? "numeric_g0" : "numeric";
  }
  return "unknown";
}

SolverSpec parse_solver(std::string_view name) {
  if (name == "analytic") return {SolverKind::AnalyticAuto, false};
  if (name == "linear") return {SolverKind::LinearLimit, false};
  if (name == "numeric") return {SolverKind::Numeric, false};
  if (name == "numeric_g0") return {SolverKind::Numeric, true};
  throw ParameterError("unknown solver '" + std::string(name) + "' (analytic, numeric, numeric_g0, linear)");
}

double Grid::value(int k) const {
  if (k == count - 1) return stop;
  return start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
}

void SweepSpec::validate() const {
  if (grid.count < 2) throw ParameterError("grid count must be at least 2");
  if (!std::isfinite(grid.start) || !std::isfinite(grid.stop) || !(grid.start < grid.stop))
    throw ParameterError("grid needs finite start < stop");
  if (solvers.empty()) throw ParameterError("at least one solver is required");
  for (std::size_t i = 0; i < solvers.size(); ++i)
    for (std::size_t j = i + 1; j < solvers.size(); ++j)
      if (solvers[i] == solvers[j]) throw ParameterError("solver '" + solvers[i].name() + "' listed twice");
  if (variable == SweepVariable::N && grid.start < 1.0) throw ParameterError("an N sweep must start at 1 or above");
  for (const Curve& c : curves)
    if (c.eta_sqrtn && (*c.eta_sqrtn < 0.0 || !std::isfinite(*c.eta_sqrtn)))
      throw ParameterError("curve '" + c.label + "': eta-sqrtn must be finite and non-negative");
  if (workers < 0) throw ParameterError("workers must be non-negative");
  base.validate();
}

std::vector<Curve> SweepSpec::effective_curves() const {
  return curves.empty() ? std::vector<Curve>{Curve{}} : curves;
}

PhysicalParams point_params(const SweepSpec& spec, const Curve& curve, double value) {
  PhysicalParams p = spec.base;
  if (spec.variable == SweepVariable::N) p.n_emitters = static_cast<int>(std::lround(value));
  if (curve.eta_sqrtn) p.eta = *curve.eta_sqrtn / p.sqrt_n();
  switch (spec.variable) {
    case SweepVariable::DeltaC: p.delta_c = value; break;
    case SweepVariable::DeltaPhi: p.phi1 = p.phi2 + value; break;
    case SweepVariable::Eta: p.eta = value; break;
    case SweepVariable::N: break;
  }
  return p;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::vector<Curve> curves = spec.effective_curves();
  std::vector<SweepRow> rows(spec.grid.count);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next++; k < spec.grid.count; k = next++) {
      SweepRow& row = rows[k];
      row.value = spec.grid.value(k);
      for (const Curve& c : curves) row.curves.push_back(run_point(spec, c, row.value));
    }
  };
  int workers = spec.workers > 0 ? spec.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, spec.grid.count);
  if (workers == 1) {
    work();
    return rows;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  return rows;
}

bool all_failed(const std::vector<SweepRow>& rows) {
  for (const SweepRow& row : rows)
    for (const CurveResult& c : row.curves)
      for (const SolverResult& r : c.solvers)
        if (r.observables) return false;
  return true;
}

std::vector<std::string> preset_names() { return {"fig1a", "fig1b", "fig2", "fig3a", "fig3b", "fig4"}; }

SweepSpec preset(std::string_view name, int n_emitters) {
  if (n_emitters < 1) throw ParameterError("N must be at least 1");
  const double root = std::sqrt(static_cast<double>(n_emitters));
  SweepSpec spec;
  spec.name = std::string(name);
  spec.base.n_emitters = n_emitters;
  spec.base.gamma = 1.0;
  spec.base.kappa = 1.62e6;
  spec.base.g_c = 5.02e3 / root;
  spec.base.omega_n_minus_omega_c = 50.0;
  spec.base.eta = 0.0;
  spec.curves = {Curve{"eta0", 0.0}, Curve{"eta1", 1.0}};
  spec.grid = Grid{-300.0, 300.0, 401};
  spec.solvers = {SolverSpec{SolverKind::AnalyticAuto, false}};

  const double sqrtn_omega = 50.0;
  const double epsilon = 3e3;
  if (name == "fig1a") {
    spec.base.omega_rabi = sqrtn_omega / root;
    spec.base.epsilon_drive = 0.0;
  } else if (name == "fig1b") {
    spec.base.omega_rabi = 0.0;
    spec.base.epsilon_drive = epsilon;
  } else if (name == "fig2") {
    spec.base.omega_rabi = sqrtn_omega / root;
    spec.base.epsilon_drive = 0.0;
    spec.grid = Grid{-3e6, 3e6, 401};
  } else if (name == "fig3a" || name == "fig3b") {
    spec.base.omega_rabi = sqrtn_omega / root;
    spec.base.epsilon_drive = epsilon;
    spec.base.phi1 = name == "fig3b" ? std::numbers::pi / 2.0 : 0.0;
  } else if (name == "fig4") {
    spec.base.omega_rabi = sqrtn_omega / root;
    spec.base.epsilon_drive = epsilon;
    spec.base.eta = 1.0 / root;
    spec.curves = {Curve{"eta1", 1.0}};
    spec.grid = Grid{-200.0, 200.0, 100};
    spec.solvers = {SolverSpec{SolverKind::AnalyticAuto, false}, SolverSpec{SolverKind::Numeric, true}};
  } else {
    std::ostringstream msg;
    msg << "unknown preset '" << name << "'; choose one of";
    for (const std::string& n : preset_names()) msg << ' ' << n;
    throw ParameterError(msg.str());
  }
  return spec;
}

std::vector<std::string> column_names(const SweepSpec& spec) {
  std::vector<std::string> cols{std::string(to_string(spec.variable))};
  for (const Curve& c : spec.effective_curves()) {
    const std::string pre = prefix(c);
    for (const char* f : kDerivedFields) cols.push_back(pre + f);
    for (const SolverSpec& s : spec.solvers) {
      const std::string sp = pre + s.name() + "_";
      for (const char* f : kObservableFields) cols.push_back(sp + f);
      if (s.kind == SolverKind::Numeric)
        for (const char* f : kNumericFields) cols.push_back(sp + f);
    }
  }
  return cols;
}

void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  const std::vector<std::string> cols = column_names(spec);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const SweepRow& row : rows) {
    const std::vector<Cell> cells = row_cells(spec, row);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      if (const double* v = std::get_if<double>(&cells[i]))
        out << format_number(*v);
      else
        out << csv_quote(std::get<std::string>(cells[i]));
    }
    out << '\n';
  }
}

void write_jsonl(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  const std::vector<std::string> cols = column_names(spec);
  for (const SweepRow& row : rows) {
    const std::vector<Cell> cells = row_cells(spec, row);
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (const double* v = std::get_if<double>(&cells[i])) {
        // Round through the CSV text so both formats carry the same digits.
        if (std::isfinite(*v))
          obj[cols[i]] = std::stod(format_number(*v));
        else
          obj[cols[i]] = nullptr;
      } else {
        obj[cols[i]] = std::get<std::string>(cells[i]);
      }
    }
    out << obj.dump() << '\n';
  }
}

void emit(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  auto write = [&](std::ostream& out) {
    if (spec.format == OutputFormat::Csv)
      write_csv(out, spec, rows);
    else
      write_jsonl(out, spec, rows);
  };
  if (spec.output_path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream file(spec.output_path, std::ios::binary | std::ios::trunc);
  if (!file) throw OutputError("cannot open '" + spec.output_path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw OutputError("failed writing '" + spec.output_path + "'");
}

}  // namespace ccqed
