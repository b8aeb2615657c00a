#pragma once

#include <optional>
#include <vector>

#include "qdecon/linalg.hpp"

namespace qdecon {

/// One nonzero of a Hermitian constraint matrix. For row != col the mirrored
/// conjugate entry is implied, so the pair contributes 2 Re(value * X(col,row)).
struct SdpEntry {
  int row = 0;
  int col = 0;
  Complex value;
};

/// The part of a constraint matrix living in one block, stored either dense
/// (full Hermitian matrix) or as upper-triangle entries.
struct SdpPart {
  int block = 0;
  Matrix dense;                 // used when non-empty
  std::vector<SdpEntry> entries;
};

/// Real linear constraint Re Tr(A X) = b over block-diagonal Hermitian X.
struct SdpConstraint {
  std::vector<SdpPart> parts;
  double rhs = 0.0;
};

/// maximize Re Tr(C X)  s.t.  Re Tr(A_i X) = b_i,  X >= 0 (block diagonal).
/// Dual: minimize b'y  s.t.  Z = sum_i y_i A_i - C >= 0.
struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<Matrix> objective;  // C per block (Hermitian)
  std::vector<SdpConstraint> constraints;
};

struct SdpOptions {
  int max_iters = 100;
  double tol = 1e-10;
  std::optional<std::vector<Matrix>> x0;  // interior primal start
};

struct SdpResult {
  std::vector<Matrix> x;
  std::vector<Matrix> z;
  RealVector y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Primal-dual interior point method (HKM direction, Mehrotra
/// predictor-corrector, infeasible start) for small dense complex SDPs.
SdpResult solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

/// Re Tr(A X) for a single constraint.
double constraint_value(const SdpConstraint& c, const std::vector<Matrix>& x);

/// sum_i y_i A_i, per block.
std::vector<Matrix> constraint_adjoint(const SdpProblem& problem, const RealVector& y);

}  // namespace qdecon
