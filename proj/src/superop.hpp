#pragma once

#include "ccqed/lindblad.hpp"

namespace ccqed::detail {

/// L += c (B^T kron A), the column-stacked form of rho -> c A rho B.
void add_sandwich(Matrix& l, const Matrix& a, const Matrix& b, Complex c);

/// L += -i[H, rho].
void add_hamiltonian(Matrix& l, const Matrix& h);

/// L += -(c/2)([A, B rho] + [rho B^dag, A^dag]).
void add_damping(Matrix& l, const Matrix& a, const Matrix& b, Complex c);

Matrix identity(int dim);

}  // namespace ccqed::detail
