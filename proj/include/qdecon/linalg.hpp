#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qdecon {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical tolerances used when validating states, channels and isometries.
struct Tolerances {
  double herm = 1e-9;   // max |M - M^dag| entry
  double trace = 1e-9;  // |Tr rho - 1|
  double psd = 1e-9;    // eigenvalue floor
  double iso = 1e-9;    // max |V^dag V - I| entry
  double tp = 1e-9;     // max |Tr_out J - I| entry
  double gap = 1e-6;    // optimizer certificate
};

/// How hermitian_fn treats eigenvalues at or below the psd tolerance.
enum class NullPolicy {
  Apply,  // evaluate f on every eigenvalue
  Zero,   // map eigenvalues <= tol to 0 (0 log 0 = 0, pseudo-inverse)
};

struct HermitianEig {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors
};

/// Eigendecomposition of the Hermitian part of `h`.
HermitianEig eigh(const Matrix& h);

/// Applies `f` to the eigenvalues of a Hermitian matrix.
/// Throws Error when `h` is not Hermitian within `tol_herm`.
Matrix hermitian_fn(const Matrix& h, const std::function<double(double)>& f,
                    NullPolicy policy = NullPolicy::Zero,
                    double tol_psd = 1e-9, double tol_herm = 1e-9);

double max_abs(const Matrix& m);
double hermiticity_defect(const Matrix& m);
Matrix hermitian_part(const Matrix& m);
Matrix kron(const Matrix& a, const Matrix& b);

/// Schatten-1 norm via singular values.
double trace_norm(const Matrix& m);

/// Completes the orthonormal columns of `v` to a unitary of the same row
/// count. Deterministic: uses Householder QR of [v | I].
Matrix complete_to_unitary(const Matrix& v);

}  // namespace qdecon
