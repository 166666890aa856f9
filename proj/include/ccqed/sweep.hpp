#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccqed/lindblad.hpp"
#include "ccqed/model.hpp"
#include "ccqed/observables.hpp"

namespace ccqed {

enum class SweepVariable { DeltaC, DeltaPhi, Eta, N };

/// Column name: delta_c, delta_phi, eta, n.
std::string_view to_string(SweepVariable variable);

enum class SolverKind { AnalyticAuto, Numeric, LinearLimit };

struct SolverSpec {
  SolverKind kind = SolverKind::AnalyticAuto;
  bool gamma0 = false;  // Numeric only

  /// analytic, numeric, numeric_g0, linear
  std::string name() const;
  bool operator==(const SolverSpec&) const = default;
};

/// Inverse of SolverSpec::name. Throws ParameterError.
SolverSpec parse_solver(std::string_view name);

struct Grid {
  double start = -300.0;
  double stop = 300.0;
  int count = 401;

  double value(int k) const;
};

/// One line of a figure: eta fixed through sqrt(N) eta, or the base eta if unset.
struct Curve {
  std::string label;
  std::optional<double> eta_sqrtn;
};

enum class OutputFormat { Csv, JsonLines };

struct SweepSpec {
  std::string name = "sweep";
  PhysicalParams base;
  SweepVariable variable = SweepVariable::DeltaC;
  Grid grid;
  std::vector<Curve> curves;  // empty: one unlabelled curve on base
  std::vector<SolverSpec> solvers{SolverSpec{}};
  NumericControl numeric;
  OutputFormat format = OutputFormat::Csv;
  std::string output_path;  // empty: stdout
  int workers = 0;          // 0: one per hardware thread

  /// count >= 2, start < stop, solvers non-empty, base valid. ParameterError.
  void validate() const;
  /// curves, or a single unlabelled curve.
  std::vector<Curve> effective_curves() const;
};

struct DerivedRates {
  double n_delta_c = 0.0;
  double n_gamma_c = 0.0;
  double gamma_s = 0.0;
  double g_eff_sq = 0.0;
};

struct SolverResult {
  std::optional<Observables> observables;
  int fock_dim = 0;                    // Numeric only
  std::optional<double> min_eigenvalue;  // Numeric only
  std::string error_kind;              // empty on success
  std::string error;
};

struct CurveResult {
  std::optional<DerivedRates> derived;
  std::string error_kind;
  std::string error;
  std::vector<SolverResult> solvers;
};

struct SweepRow {
  double value = 0.0;
  std::vector<CurveResult> curves;
};

/// Parameters at one grid value: curve eta first, then the swept variable.
PhysicalParams point_params(const SweepSpec& spec, const Curve& curve, double value);

/// Rows in grid order. Grid points run on a worker pool; failures are kept
/// in the row.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// True if no solver succeeded anywhere.
bool all_failed(const std::vector<SweepRow>& rows);

/// fig1a, fig1b, fig2, fig3a, fig3b, fig4 at the given N. ParameterError
/// for an unknown name.
SweepSpec preset(std::string_view name, int n_emitters = 100);
std::vector<std::string> preset_names();

std::vector<std::string> column_names(const SweepSpec& spec);
void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows);
void write_jsonl(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows);

/// Writes to spec.output_path (stdout if empty) in spec.format. OutputError
/// if the file cannot be written.
void emit(const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace ccqed
