#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "uqcm/basis.hpp"

namespace uqcm {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

/// Complex amplitude vector over a composite basis. Values are immutable in
/// spirit: operations take states by const reference and return new ones.
struct PureState {
  BasisLayout layout;
  Vector amplitudes;

  PureState(BasisLayout lay, Vector amp) : layout(std::move(lay)), amplitudes(std::move(amp)) {
    if (amplitudes.size() != layout.total_dim())
      throw std::invalid_argument("PureState: amplitude length does not match layout " + layout.to_string());
  }

  double norm() const { return amplitudes.norm(); }

  PureState normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("PureState: cannot normalize the zero vector");
    return PureState(layout, amplitudes / n);
  }
};

struct DensityMatrix {
  BasisLayout layout;
  Matrix matrix;

  DensityMatrix(BasisLayout lay, Matrix m) : layout(std::move(lay)), matrix(std::move(m)) {
    if (matrix.rows() != layout.total_dim() || matrix.cols() != matrix.rows())
      throw std::invalid_argument("DensityMatrix: shape does not match layout " + layout.to_string());
  }

  double trace_real() const { return matrix.trace().real(); }

  double hermiticity_residual() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

inline PureState basis_state(const BasisLayout& layout, int flat_index) {
  if (flat_index < 0 || flat_index >= layout.total_dim())
    throw std::invalid_argument("basis_state: index out of range");
  Vector v = Vector::Zero(layout.total_dim());
  v(flat_index) = 1.0;
  return PureState(layout, v);
}

inline PureState ket_g() { return basis_state(BasisLayout::atoms(1), 0); }
inline PureState ket_e() { return basis_state(BasisLayout::atoms(1), 1); }

/// Kronecker product of states; a's factors become the most significant.
inline PureState tensor(const PureState& a, const PureState& b) {
  const int db = b.layout.total_dim();
  Vector out(a.layout.total_dim() * db);
  for (int i = 0; i < a.amplitudes.size(); ++i)
    out.segment(i * db, db) = a.amplitudes(i) * b.amplitudes;
  return PureState(a.layout.concat(b.layout), std::move(out));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  const int da = static_cast<int>(a.matrix.rows());
  const int db = static_cast<int>(b.matrix.rows());
  Matrix out(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = a.matrix(i, j) * b.matrix;
  return DensityMatrix(a.layout.concat(b.layout), std::move(out));
}

inline DensityMatrix pure_to_density(const PureState& psi) {
  return DensityMatrix(psi.layout, psi.amplitudes * psi.amplitudes.adjoint());
}

inline cplx inner_product(const PureState& a, const PureState& b) {
  if (a.layout != b.layout)
    throw std::invalid_argument("inner_product: layout mismatch " + a.layout.to_string() + " vs " + b.layout.to_string());
  return a.amplitudes.dot(b.amplitudes);  // Eigen's dot conjugates the left argument
}

/// Reduces to the listed factors (original factor order), summing over the rest.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  if (std::unique(kept.begin(), kept.end()) != kept.end())
    throw std::invalid_argument("partial_trace: duplicate factor index");
  for (int f : kept) rho.layout.check_factor(f);

  const auto& lay = rho.layout;
  std::vector<int> traced;
  for (int f = 0; f < lay.n_factors(); ++f)
    if (!std::binary_search(kept.begin(), kept.end(), f)) traced.push_back(f);

  std::vector<int> kept_dims, traced_dims;
  for (int f : kept) kept_dims.push_back(lay.dim(f));
  int traced_total = 1;
  for (int f : traced) {
    traced_dims.push_back(lay.dim(f));
    traced_total *= lay.dim(f);
  }

  BasisLayout out_layout(kept_dims);
  const int dout = out_layout.total_dim();
  Matrix out = Matrix::Zero(dout, dout);

  // Compose full flat indices from (kept digits, traced digits).
  auto full_index = [&](int kept_flat, int traced_flat) {
    int idx = 0;
    for (std::size_t i = 0; i < kept.size(); ++i)
      idx += out_layout.digit(kept_flat, static_cast<int>(i)) * lay.stride(kept[i]);
    int rem = traced_flat;
    for (std::size_t i = traced.size(); i-- > 0;) {
      idx += (rem % traced_dims[i]) * lay.stride(traced[i]);
      rem /= traced_dims[i];
    }
    return idx;
  };

  for (int r = 0; r < dout; ++r)
    for (int c = 0; c < dout; ++c) {
      cplx acc = 0.0;
      for (int t = 0; t < traced_total; ++t) acc += rho.matrix(full_index(r, t), full_index(c, t));
      out(r, c) = acc;
    }
  return DensityMatrix(std::move(out_layout), std::move(out));
}

/// <psi|rho|psi>, real part (imaginary part is arithmetic noise for Hermitian rho).
inline double fidelity_pure(const DensityMatrix& rho, const PureState& psi) {
  if (rho.layout != psi.layout)
    throw std::invalid_argument("fidelity_pure: layout mismatch " + rho.layout.to_string() + " vs " + psi.layout.to_string());
  const cplx v = psi.amplitudes.dot(rho.matrix * psi.amplitudes);
  return v.real();
}

/// |<psi|phi>|: insensitive to a global phase on either argument.
inline double overlap_up_to_global_phase(const PureState& psi, const PureState& phi) {
  return std::abs(inner_product(psi, phi));
}

/// Single qubit cos(theta/2)|g> + e^{i phi} sin(theta/2)|e>.
inline PureState bloch_state(double theta, double phi) {
  Vector v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::polar(std::sin(theta / 2.0), phi);
  return PureState(BasisLayout::atoms(1), std::move(v));
}

}  // namespace uqcm
