#include "ccqed/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "ccqed/errors.hpp"
#include "superop.hpp"

namespace ccqed {
namespace detail {

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

void add_sandwich(Matrix& l, const Matrix& a, const Matrix& b, Complex c) {
  const Eigen::Index d = a.rows();
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const Complex coef = c * b(j, k);
      if (coef == Complex{}) continue;
      l.block(k * d, j * d, d, d) += coef * a;
    }
  }
}

void add_hamiltonian(Matrix& l, const Matrix& h) {
  const Matrix id = identity(static_cast<int>(h.rows()));
  add_sandwich(l, h, id, Complex{0.0, -1.0});
  add_sandwich(l, id, h, Complex{0.0, 1.0});
}

void add_damping(Matrix& l, const Matrix& a, const Matrix& b, Complex c) {
  const Matrix id = identity(static_cast<int>(a.rows()));
  const Matrix ad = a.adjoint();
  const Matrix bd = b.adjoint();
  const Complex half = 0.5 * c;
  add_sandwich(l, a * b, id, -half);
  add_sandwich(l, b, a, half);
  add_sandwich(l, id, bd * ad, -half);
  add_sandwich(l, ad, bd, half);
}

}  // namespace detail

namespace {

constexpr double kResidualTarget = 1e-10;
constexpr double kRcondFloor = 1e-12;
constexpr double kNullSpaceGap = 1e-10;
constexpr double kTraceDrift = 1e-8;
constexpr double kG2Floor = 1e-14;
constexpr int kInverseIterations = 20;

double relative_residual(const Matrix& l, double l_norm, const Vector& x) {
  const double xn = x.norm();
  if (!(xn > 0.0) || !std::isfinite(xn)) return std::numeric_limits<double>::infinity();
  return (l * x).norm() / (l_norm * xn);
}

void check_degenerate(const Matrix& l) {
  const Eigen::BDCSVD<Matrix> svd(l);
  const auto& sv = svd.singularValues();
  const Eigen::Index n = sv.size();
  if (n < 2) return;
  const double smallest = sv(n - 1);
  const double next = sv(n - 2);
  if (next <= kNullSpaceGap * sv(0)) {
    std::ostringstream msg;
    msg << "steady state is not unique: two smallest singular values of L are " << smallest << " and " << next
        << " (largest " << sv(0) << ")";
    throw DegenerateSteadyStateError(msg.str(), smallest, next);
  }
}

Vector inverse_iteration(const Matrix& l, double l_norm, Vector x, double& residual) {
  const Eigen::Index n = l.rows();
  const double shift = 1e-13 * l_norm;
  Matrix shifted = l;
  shifted.diagonal().array() -= shift;
  const Eigen::PartialPivLU<Matrix> lu(shifted);
  if (!std::isfinite(x.norm()) || x.norm() == 0.0) x = Vector::Ones(n);
  for (int it = 0; it < kInverseIterations; ++it) {
    x = lu.solve(x);
    const double xn = x.norm();
    if (!std::isfinite(xn) || xn == 0.0) break;
    x /= xn;
    residual = relative_residual(l, l_norm, x);
    if (residual <= kResidualTarget) break;
  }
  return x;
}

Matrix matrix_trace_normalized(const Vector& x, int dim) {
  Matrix rho = unvectorize(x, dim);
  return rho / rho.trace();
}

}  // namespace

Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unvectorize(const Vector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim)
    throw ParameterError("unvectorize: length does not match dim^2");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

FockOperator annihilation(int dim) {
  if (dim < 1) throw ParameterError("Fock dimension must be positive");
  FockOperator b{dim, Matrix::Zero(dim, dim)};
  for (int m = 0; m + 1 < dim; ++m) b.entries(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
  return b;
}

std::string PhysicalityReport::describe() const {
  std::ostringstream out;
  out << "trace error " << trace_error << (trace_ok() ? "" : " (FAIL)") << ", hermiticity error "
      << hermiticity_error << (hermitian_ok() ? "" : " (FAIL)") << ", min eigenvalue " << min_eigenvalue
      << (positive_ok() ? "" : " (FAIL)") << ", boundary population " << boundary_population
      << (truncation_ok() ? "" : " (FAIL)");
  return out.str();
}

PhysicalityReport check_physicality(const Matrix& rho, double boundary_population) {
  PhysicalityReport r;
  r.trace_error = std::abs(rho.trace() - 1.0);
  const Matrix adj = rho.adjoint();
  r.hermiticity_error = (rho - adj).cwiseAbs().maxCoeff();
  const Matrix herm = 0.5 * (rho + adj);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(herm, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = eig.eigenvalues().minCoeff();
  r.boundary_population = boundary_population;
  return r;
}

PhysicalityReport DensityMatrix::physicality() const {
  return check_physicality(entries, std::real(entries(dim - 1, dim - 1)));
}

void write_density_matrix(std::ostream& out, const Matrix& rho) {
  char buf[64];
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", rho(i, j).real(), rho(i, j).imag());
      if (j > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

Liouvillian build_hp_liouvillian(const EffectiveModel& model, int dim, bool include_gamma0) {
  if (dim < 4) throw ParameterError("Fock dimension must be at least 4");
  const Matrix b = annihilation(dim).entries;
  const Matrix bd = b.adjoint();
  const Matrix bd2 = bd * bd;
  const Matrix b2 = b * b;

  const Matrix h = model.bar_delta_n * (bd * b) + model.bar_omega * bd + std::conj(model.bar_omega) * b -
                   model.tilde_omega * (bd2 * b) - std::conj(model.tilde_omega) * (bd * b2) -
                   model.bar_delta * (bd2 * b2);

  Liouvillian l;
  l.dim = dim;
  l.matrix = Matrix::Zero(static_cast<Eigen::Index>(dim) * dim, static_cast<Eigen::Index>(dim) * dim);
  detail::add_hamiltonian(l.matrix, h);
  detail::add_damping(l.matrix, bd, b, model.big_gamma);
  // +(Gamma_0/2)([b^dag2 b, b rho] + [rho b^dag, b^dag b^2]) is a damping term with negative rate.
  if (include_gamma0) detail::add_damping(l.matrix, bd2 * b, b, -model.gamma0);
  l.fastest_rate = std::max({std::abs(model.bar_delta_n), model.big_gamma, std::abs(model.bar_omega)});
  return l;
}

Matrix steady_state_matrix(const Liouvillian& liouvillian) {
  const int dim = liouvillian.dim;
  const Matrix& l = liouvillian.matrix;
  const Eigen::Index n = l.rows();
  const double l_norm = l.norm();
  if (!(l_norm > 0.0)) throw DegenerateSteadyStateError("steady state is not unique: L = 0", 0.0, 0.0);

  // rho[0,0]'s row is minus the sum of the other diagonal rows, so it can
  // carry the trace constraint instead.
  Matrix m = l;
  m.row(0).setZero();
  for (int i = 0; i < dim; ++i) m(0, static_cast<Eigen::Index>(i) * dim + i) = 1.0;
  Vector rhs = Vector::Zero(n);
  rhs(0) = 1.0;

  const Eigen::PartialPivLU<Matrix> lu(m);
  const double rcond = lu.rcond();
  // PartialPivLU skips exact zero pivots silently, so look at them directly.
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_ratio = pivots.minCoeff() / pivots.maxCoeff();
  Vector x = lu.solve(rhs);
  double residual = relative_residual(l, l_norm, x);
  if (!(rcond > kRcondFloor) || !(pivot_ratio > kRcondFloor) || !(residual <= kResidualTarget)) check_degenerate(l);
  if (!(residual <= kResidualTarget)) x = inverse_iteration(l, l_norm, x, residual);
  if (!(residual <= kResidualTarget)) {
    std::ostringstream msg;
    msg << "steady-state solve did not converge: relative residual " << residual << " (target "
        << kResidualTarget << "), rcond " << rcond;
    throw SolverError(msg.str(), residual);
  }
  return matrix_trace_normalized(x, dim);
}

DensityMatrix steady_state(const Liouvillian& liouvillian) {
  return DensityMatrix{liouvillian.dim, steady_state_matrix(liouvillian)};
}

Matrix evolve(const Liouvillian& liouvillian, const Matrix& rho0, double t_final, double dt) {
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw StepSizeError("t_final must be finite and non-negative");
  if (!(dt > 0.0)) throw StepSizeError("dt must be positive");
  if (liouvillian.fastest_rate > 0.0 && dt > 0.1 / liouvillian.fastest_rate * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << dt << " does not resolve the fastest rate " << liouvillian.fastest_rate << "; need dt <= "
        << 0.1 / liouvillian.fastest_rate;
    throw StepSizeError(msg.str());
  }
  const int dim = static_cast<int>(rho0.rows());
  if (static_cast<Eigen::Index>(dim) * dim != liouvillian.matrix.rows())
    throw ParameterError("evolve: rho0 does not match the generator dimension");
  if (t_final == 0.0) return rho0;

  const long steps = std::max(1L, static_cast<long>(std::ceil(t_final / dt - 1e-9)));
  const double h = t_final / static_cast<double>(steps);
  const Matrix& l = liouvillian.matrix;
  Vector v = vectorize(rho0);
  const Complex trace0 = rho0.trace();
  Vector k1, k2, k3, k4;
  for (long s = 0; s < steps; ++s) {
    k1.noalias() = l * v;
    k2.noalias() = l * (v + 0.5 * h * k1);
    k3.noalias() = l * (v + 0.5 * h * k2);
    k4.noalias() = l * (v + h * k3);
    v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  Matrix rho = unvectorize(v, dim);
  const double drift = std::abs(rho.trace() - trace0);
  if (!(drift <= kTraceDrift)) {
    std::ostringstream msg;
    msg << "trace drifted by " << drift << " over " << steps << " steps of " << h;
    throw StepSizeError(msg.str());
  }
  return rho;
}

DensityMatrix evolve(const Liouvillian& liouvillian, const DensityMatrix& rho0, double t_final, double dt) {
  return DensityMatrix{rho0.dim, evolve(liouvillian, rho0.entries, t_final, dt)};
}

Observables observables_from_rho(const DensityMatrix& rho, int n_emitters) {
  Observables obs;
  obs.branch = Branch::Numeric;
  obs.terms_used = rho.dim;
  for (int m = 0; m < rho.dim; ++m) {
    const double p = std::real(rho.entries(m, m));
    obs.mean_excitation += m * p;
    obs.second_moment += static_cast<double>(m) * (m - 1) * p;
    if (m + 1 < rho.dim) obs.amplitude += std::sqrt(static_cast<double>(m + 1)) * rho.entries(m + 1, m);
  }
  obs.truncation_residual = std::real(rho.entries(rho.dim - 1, rho.dim - 1));
  finalize_observables(obs, n_emitters, kG2Floor);
  return obs;
}

namespace {

double relative_change(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > kG2Floor ? std::abs(a - b) / scale : 0.0;
}

double doubling_change(const Observables& small, const Observables& large) {
  double change = relative_change(small.mean_excitation, large.mean_excitation);
  if (small.g2 && large.g2)
    change = std::max(change, relative_change(*small.g2, *large.g2));
  else if (small.g2.has_value() != large.g2.has_value())
    change = std::numeric_limits<double>::infinity();
  return change;
}

NumericSolution solve_at(const EffectiveModel& model, bool include_gamma0, int dim) {
  NumericSolution s;
  s.dim = dim;
  s.rho = steady_state(build_hp_liouvillian(model, dim, include_gamma0));
  s.observables = observables_from_rho(s.rho, model.n);
  s.physicality = s.rho.physicality();
  return s;
}

}  // namespace

NumericSolution solve_numeric(const EffectiveModel& model, bool include_gamma0, const NumericControl& control) {
  if (control.start_dim < 4 || control.max_dim < control.start_dim)
    throw ParameterError("numeric control needs 4 <= start_dim <= max_dim");
  NumericSolution prev = solve_at(model, include_gamma0, control.start_dim);
  while (true) {
    const int next_dim = 2 * prev.dim;
    if (next_dim > control.max_dim) {
      std::ostringstream msg;
      msg << "Fock truncation not converged at D = " << prev.dim << " (boundary population "
          << prev.physicality.boundary_population << "); raise max_dim above " << control.max_dim
          << " or weaken the drive";
      throw TruncationError(msg.str(), prev.dim, prev.physicality.boundary_population);
    }
    NumericSolution cur = solve_at(model, include_gamma0, next_dim);
    cur.doubling_change = doubling_change(prev.observables, cur.observables);
    if (cur.doubling_change <= control.relative_change && cur.physicality.truncation_ok()) {
      if (!cur.physicality.ok()) cur.observables.warnings.push_back("non-physical steady state: " + cur.physicality.describe());
      return cur;
    }
    prev = std::move(cur);
  }
}

}  // namespace ccqed
