#pragma once

#include <cstdint>

#include <map>
#include <string>

#include "qdecon/layout.hpp"
#include "qdecon/linalg.hpp"

namespace qdecon {

/// Density operator on a labeled multipartite Hilbert space.
///
/// The validating constructor checks Hermiticity, unit trace and positivity.
/// Eigenvalues in (-tol.psd, 0) are clipped to zero and the state is
/// renormalized; anything more negative is rejected.
class MultipartiteState {
 public:
  MultipartiteState(SystemLayout layout, Matrix rho, const Tolerances& tol = {});

  /// Builds a state from an operation known to preserve validity. Only the
  /// shape is checked; the matrix is symmetrized.
  static MultipartiteState unchecked(SystemLayout layout, Matrix rho);

  const SystemLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return rho_; }
  long dim() const { return rho_.rows(); }
  const Labels& labels() const { return layout_.labels(); }

 private:
  struct Trusted {};
  MultipartiteState(Trusted, SystemLayout layout, Matrix rho);

  SystemLayout layout_;
  Matrix rho_;
};

/// Linear map V from `in_layout` to `out_layout` with V^dag V = I.
class Isometry {
 public:
  Isometry(SystemLayout in, SystemLayout out, Matrix v, const Tolerances& tol = {});
  static Isometry unchecked(SystemLayout in, SystemLayout out, Matrix v);

  const SystemLayout& in_layout() const { return in_; }
  const SystemLayout& out_layout() const { return out_; }
  const Matrix& matrix() const { return v_; }
  bool is_square() const { return v_.rows() == v_.cols(); }
  /// True when in and out layouts carry the same labels in the same order.
  bool in_place() const { return in_.labels() == out_.labels(); }

  /// Inverse of a square isometry; swaps the layouts.
  Isometry adjoint() const;

 private:
  struct Trusted {};
  Isometry(Trusted, SystemLayout in, SystemLayout out, Matrix v);

  SystemLayout in_;
  SystemLayout out_;
  Matrix v_;
};

Isometry identity_isometry(const SystemLayout& layout);

/// second * first; requires second.in_layout() == first.out_layout().
Isometry compose(const Isometry& second, const Isometry& first);

/// Embeds an in-place isometry into `full`, acting as identity elsewhere.
/// The result is in place on `full`.
Isometry lift(const Isometry& u, const SystemLayout& full);

/// Embeds `u` (acting on its input systems, which must be present in `full`)
/// into an isometry on `full`. Output systems are ordered as in
/// apply_on_subsystems.
Isometry extend(const Isometry& u, const SystemLayout& full);

/// Tensor product of two isometries on disjoint systems.
Isometry tensor(const Isometry& a, const Isometry& b);

MultipartiteState tensor_product(const MultipartiteState& a,
                                 const MultipartiteState& b);

MultipartiteState partial_trace(const MultipartiteState& s, const Labels& drop);

/// Reduced state on `keep`, with systems in the order given by `keep`.
MultipartiteState marginal(const MultipartiteState& s, const Labels& keep);

/// Reorders systems; `order` must be a permutation of the state's labels.
MultipartiteState permute_systems(const MultipartiteState& s, const Labels& order);

MultipartiteState relabel(const MultipartiteState& s,
                          const std::map<std::string, std::string>& rename);

/// Applies `u` to the systems `targets` (which must match u.in_layout() in
/// order and dimension). In-place isometries keep the layout; otherwise the
/// output systems are inserted where the first target stood.
MultipartiteState apply_on_subsystems(const Isometry& u, const MultipartiteState& s,
                                      const Labels& targets);

/// Minimal purification: appends a reference of dimension rank(s).
MultipartiteState purify(const MultipartiteState& s, const std::string& ref_label,
                         double tol_psd = 1e-9);

/// Unit vector in the span of the state's support, when the state is pure.
Vector pure_vector(const MultipartiteState& s, double tol = 1e-9);

MultipartiteState maximally_mixed(const SystemLayout& layout);
MultipartiteState pure_state(const SystemLayout& layout, const Vector& psi);
MultipartiteState basis_state(const SystemLayout& layout, long index);
/// |Phi> = d^{-1/2} sum_i |i>_a |i>_b.
MultipartiteState maximally_entangled(const std::string& a, const std::string& b, int d);

/// Seeded Haar-random pure state (normalized complex Gaussian vector).
MultipartiteState random_pure_state(const SystemLayout& layout, std::uint64_t seed);
/// Seeded random mixed state of the given rank (Ginibre, rank 0 = full).
MultipartiteState random_mixed_state(const SystemLayout& layout, std::uint64_t seed,
                                     long rank = 0);
/// Seeded Haar-random unitary (QR of a Ginibre matrix, phases fixed).
Isometry random_unitary(const SystemLayout& layout, std::uint64_t seed);

/// Layout-generic index bookkeeping used to move systems to the front.
Matrix permute_matrix(const Matrix& m, const SystemLayout& layout,
                      const Labels& order);

long numerical_rank(const Matrix& h, double tol);

/// Final system order after replacing `targets` by `out_labels`: the output
/// systems take the place of the first target, other systems keep their order.
/// When `out_labels == targets` the original order is returned.
Labels output_order(const SystemLayout& layout, const Labels& targets,
                    const Labels& out_labels);

}  // namespace qdecon
