#pragma once

#include <string>
#include <vector>

#include "qdecon/state.hpp"

namespace qdecon {

/// Joint distribution p(x, y, z) stored as table[(x * ny + y) * nz + z].
class ClassicalTriple {
 public:
  ClassicalTriple(int nx, int ny, int nz, std::vector<double> table);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  double p(int x, int y, int z) const { return table_[index(x, y, z)]; }
  const std::vector<double>& table() const { return table_; }
  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(x) * ny_ + y) * nz_ + z;
  }

  /// Diagonal density operator on systems labeled (x, y, z).
  MultipartiteState to_state(const std::string& x = "X", const std::string& y = "Y",
                             const std::string& z = "Z") const;

  /// I(X;Y|Z) in bits, by table summation.
  double cmi() const;
  /// H(Y|Z) in bits, by table summation.
  double conditional_entropy_yz() const;

 private:
  int nx_, ny_, nz_;
  std::vector<double> table_;
};

struct ClassicalRecovery {
  double value = 0.0;        // fidelity achieved by `table`
  double upper_bound = 1.0;  // certified upper bound on the optimum
  double gap = 1.0;
  /// Recovery map q(x, z | z'), row (x * nz + z), column z'.
  Eigen::MatrixXd table;
};

/// Largest alphabet product nx * nz * nz accepted by classical_for_oracle.
inline constexpr long kClassicalOracleLimit = 200000;

/// Optimal classical recovery of X from Z: maximizes
/// (sum_{x,y,z} sqrt(p(x,y,z) sum_z' q(x,z|z') p(y,z')))^2 over stochastic q.
/// Solved through the convex dual with a log-barrier Newton method; the
/// returned gap is an exact duality certificate.
ClassicalRecovery classical_for_oracle(const ClassicalTriple& t, double tol_gap = 1e-10);

struct AppendixB {
  ClassicalTriple fine;    // p(x, y, {k,l})
  ClassicalTriple coarse;  // p'(x', y, {k,l}) with x' = f(x)
};

/// Maximally correlated fair coins X = Y taking one of the two values of a
/// uniformly random unordered pair Z = {k, l}, k < l. The coarse triple maps
/// X to X' = x / (n / m), giving m classes.
AppendixB appendixB_triple(int n, int m);

struct AppendixBBound {
  double fid_bound = 0.0;      // (n-1) / (2(n-1) - (n/m - 1))
  double relaxed_bound = 0.0;  // ((n-1) + (n/m - 1)) / (2(n-1))
};

AppendixBBound appendixB_bound(int n, int m);

/// log2(n-1) + log2((1-2 eps)/(1-eps)); NaN for eps >= 1/2.
double appendixB_noise_bound_bits(int n, double eps);

}  // namespace qdecon
