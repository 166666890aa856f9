#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccqed/log_complex.hpp"
#include "ccqed/model.hpp"

namespace ccqed {

struct Observables {
  double mean_excitation = 0.0;   // <b^dag b>
  Complex amplitude;              // <b>
  double second_moment = 0.0;     // <b^dag2 b^2>
  std::optional<double> g2;       // empty when <b^dag b> vanishes
  Branch branch = Branch::MainSeries;
  int terms_used = 0;
  double truncation_residual = 0.0;
  double log_normalization = 0.0;  // log Z where a normalization sum exists
  std::vector<std::string> warnings;
};

/// Fraction of N above which the weak-excitation assumption is flagged.
inline constexpr double kWeakExcitationLimit = 0.1;

/// Fills g2 (if mean_excitation > g2_floor) and appends the weak-excitation
/// warning when mean_excitation / n_emitters exceeds the limit.
void finalize_observables(Observables& obs, int n_emitters, double g2_floor = 0.0);

}  // namespace ccqed
