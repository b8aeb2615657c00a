#include "qdecon/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace qdecon {

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

Matrix hermitian_part(const Matrix& m) {
  return 0.5 * (m + m.adjoint());
}

Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

HermitianEig eigh(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success) {
    throw Error("eigh: eigensolver failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix hermitian_fn(const Matrix& h, const std::function<double(double)>& f,
                    NullPolicy policy, double tol_psd, double tol_herm) {
  if (h.rows() != h.cols()) {
    throw Error("hermitian_fn: matrix is not square");
  }
  if (hermiticity_defect(h) > tol_herm) {
    throw Error("hermitian_fn: matrix is not Hermitian");
  }
  const HermitianEig e = eigh(h);
  RealVector mapped(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double x = e.values[i];
    mapped[i] = (policy == NullPolicy::Zero && x <= tol_psd) ? 0.0 : f(x);
  }
  Matrix out = e.vectors * mapped.cast<Complex>().asDiagonal() *
               e.vectors.adjoint();
  return hermitian_part(out);
}

double trace_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

Matrix complete_to_unitary(const Matrix& v) {
  const Eigen::Index n = v.rows();
  const Eigen::Index k = v.cols();
  if (k == n) return v;
  Matrix aug(n, k + n);
  aug << v, Matrix::Identity(n, n);
  Eigen::HouseholderQR<Matrix> qr(aug);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  // The first k columns of q span v's range; keep v itself there.
  Matrix u(n, n);
  u.leftCols(k) = v;
  // Orthogonalize the remaining columns against v explicitly.
  for (Eigen::Index j = k; j < n; ++j) {
    Vector c = q.col(j);
    for (Eigen::Index i = 0; i < j; ++i) {
      c -= u.col(i) * (u.col(i).adjoint() * c)(0);
    }
    u.col(j) = c / c.norm();
  }
  return u;
}

}  // namespace qdecon
