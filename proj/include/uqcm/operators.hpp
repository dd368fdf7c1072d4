#pragma once

#include <cmath>
#include <stdexcept>

#include "uqcm/state.hpp"

namespace uqcm {

enum class OperatorUnits { angular_frequency, dimensionless };

/// Dense Hermitian matrix tagged with its basis layout. Hamiltonians carry
/// angular-frequency units (rad/s); observables are dimensionless.
struct HermitianOperator {
  BasisLayout layout;
  Matrix matrix;
  OperatorUnits units;

  HermitianOperator(BasisLayout lay, Matrix m, OperatorUnits u = OperatorUnits::angular_frequency)
      : layout(std::move(lay)), matrix(std::move(m)), units(u) {
    if (matrix.rows() != layout.total_dim() || matrix.cols() != matrix.rows())
      throw std::invalid_argument("HermitianOperator: shape does not match layout " + layout.to_string());
  }

  double hermiticity_residual() const { return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff(); }
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// I x ... x op x ... x I with op on the given factor of the layout.
inline Matrix embed(const Matrix& op, const BasisLayout& layout, int factor) {
  layout.check_factor(factor);
  if (op.rows() != layout.dim(factor))
    throw std::invalid_argument("embed: operator dimension does not match factor");
  Matrix out = Matrix::Identity(1, 1);
  for (int f = 0; f < layout.n_factors(); ++f)
    out = kron(out, f == factor ? op : Matrix(Matrix::Identity(layout.dim(f), layout.dim(f))));
  return out;
}

// Qubit primitives in the (g, e) ordering.
inline Matrix sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;  // |g><e|
  return m;
}
inline Matrix sigma_plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1.0;  // |e><g|
  return m;
}
inline Matrix project_g() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.0;
  return m;
}
inline Matrix project_e() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 1) = 1.0;
  return m;
}

// Fock-space primitives on photon numbers 0..dim-1.
inline Matrix fock_annihilate(int dim) {
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return m;
}
inline Matrix fock_create(int dim) { return fock_annihilate(dim).adjoint(); }
inline Matrix fock_number(int dim) {
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
  return m;
}

inline PureState apply(const HermitianOperator& op, const PureState& psi) {
  if (op.layout != psi.layout)
    throw std::invalid_argument("apply: layout mismatch " + op.layout.to_string() + " vs " + psi.layout.to_string());
  return PureState(psi.layout, op.matrix * psi.amplitudes);
}

}  // namespace uqcm
