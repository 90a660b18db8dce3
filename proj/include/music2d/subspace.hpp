#pragma once

#include <cmath>
#include <complex>

#include <Eigen/SVD>

#include "music2d/core.hpp"
#include "music2d/synth.hpp"

namespace music2d {

template <typename Scalar>
struct SubspaceDecomposition {
  MatrixXC<Scalar> u;        // orthonormal left singular vectors, columns
  MatrixXC<Scalar> v;        // orthonormal right singular vectors, columns
  VectorX<Scalar> sigma;     // descending
  Index signal_dim{0};

  Index size() const { return sigma.size(); }
};

using SubspaceDecompositiond = SubspaceDecomposition<double>;

// Full SVD K = U S V^*. Phase convention: the largest-magnitude entry of each
// left singular vector is made real positive (same unit factor applied to the
// matching right vector, preserving the product).
template <typename Scalar>
SubspaceDecomposition<Scalar> svd(const MatrixXC<Scalar>& k) {
  using C = std::complex<Scalar>;
  if (!k.allFinite()) throw std::invalid_argument("svd: matrix has non-finite entries");

  Eigen::JacobiSVD<MatrixXC<Scalar>> dec(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SubspaceDecomposition<Scalar> out;
  out.u = dec.matrixU();
  out.v = dec.matrixV();
  out.sigma = dec.singularValues();
  for (Index m = 0; m < out.u.cols(); ++m) {
    Index imax = 0;
    out.u.col(m).cwiseAbs().maxCoeff(&imax);
    const C pivot = out.u(imax, m);
    const Scalar mag = std::abs(pivot);
    if (mag > Scalar(0)) {
      const C phase = std::conj(pivot) / mag;
      out.u.col(m) *= phase;
      out.v.col(m) *= phase;
    }
  }
  return out;
}

template <typename Scalar>
SubspaceDecomposition<Scalar> svd(const MsrMatrix<Scalar>& msr) {
  return svd(msr.matrix);
}

// Largest m with sigma_m >= tau sigma_1; 0 for an all-zero spectrum.
template <typename Scalar>
Index estimate_signal_dim(const VectorX<Scalar>& sigma, Scalar tau) {
  if (!(tau > Scalar(0) && tau < Scalar(1)))
    throw std::invalid_argument("estimate_signal_dim: tau must be in (0, 1)");
  for (Index m = 1; m < sigma.size(); ++m)
    if (sigma(m) > sigma(m - 1))
      throw std::invalid_argument("estimate_signal_dim: singular values not descending");
  if (sigma.size() == 0 || !(sigma(0) > Scalar(0))) return 0;
  Index dim = 0;
  while (dim < sigma.size() && sigma(dim) >= tau * sigma(0)) ++dim;
  return dim;
}

// |(I - sum_{m<=signal_dim} U_m U_m^*) f| in factored form, clamped at zero.
template <typename Scalar>
Scalar noise_projection_norm(const SubspaceDecomposition<Scalar>& dec,
                             const VectorXC<Scalar>& f) {
  if (f.size() != dec.u.rows())
    throw std::invalid_argument("noise_projection_norm: vector length mismatch");
  if (dec.signal_dim < 0 || dec.signal_dim > dec.size())
    throw std::invalid_argument("noise_projection_norm: signal_dim out of range");
  const Scalar total = f.squaredNorm();
  const Scalar captured = (dec.u.leftCols(dec.signal_dim).adjoint() * f).squaredNorm();
  return std::sqrt(std::max(total - captured, Scalar(0)));
}

}  // namespace music2d
