#pragma once

#include <cstdint>

#include <vector>

#include "qdecon/state.hpp"

namespace qdecon {

/// CPTP map in Choi form.
///
/// The Choi matrix lives on out (x) in, with the output factor first:
/// J = sum_{t,t'} N(|t><t'|) (x) |t><t'|. Trace preservation reads
/// Tr_out J = I_in.
class QuantumChannel {
 public:
  /// Identity channel on the trivial (one-dimensional) system.
  QuantumChannel() : choi_(Matrix::Identity(1, 1)) {}
  QuantumChannel(SystemLayout in, SystemLayout out, Matrix choi,
                 const Tolerances& tol = {});
  static QuantumChannel unchecked(SystemLayout in, SystemLayout out, Matrix choi);

  static QuantumChannel identity(const SystemLayout& layout);
  static QuantumChannel from_kraus(SystemLayout in, SystemLayout out,
                                   const std::vector<Matrix>& kraus,
                                   const Tolerances& tol = {});
  static QuantumChannel from_isometry(const Isometry& v);
  /// X -> Tr[X] sigma.
  static QuantumChannel replacement(const SystemLayout& in, const MultipartiteState& sigma);

  const SystemLayout& in_layout() const { return in_; }
  const SystemLayout& out_layout() const { return out_; }
  const Matrix& choi() const { return choi_; }
  long in_dim() const { return in_.total_dim(); }
  long out_dim() const { return out_.total_dim(); }

  /// Block N(|t><t'|) of the Choi matrix.
  Matrix block(long t, long tp) const;

 private:
  struct Trusted {};
  QuantumChannel(Trusted, SystemLayout in, SystemLayout out, Matrix choi);

  SystemLayout in_;
  SystemLayout out_;
  Matrix choi_;
};

/// Tr_out J for a Choi matrix on out (x) in.
Matrix choi_output_trace(const Matrix& choi, long out_dim, long in_dim);

/// Kraus operators from the eigendecomposition of the Choi matrix.
std::vector<Matrix> kraus_operators(const QuantumChannel& ch, double tol = 1e-14);

/// second o first; requires second.in_layout() == first.out_layout().
QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first);

/// X -> sigma (x) ch(X); the systems of `sigma` come first in the output.
QuantumChannel with_preparation(const MultipartiteState& sigma, const QuantumChannel& ch);

/// Reorders the output systems of `ch`.
QuantumChannel permute_outputs(const QuantumChannel& ch, const Labels& order);

/// Applies `ch` to `targets` (in the order of ch.in_layout()). Output systems
/// take the place of the first target unless the labels are unchanged.
MultipartiteState apply_channel(const QuantumChannel& ch, const MultipartiteState& s,
                                const Labels& targets);

/// Applies a linear map given by Choi matrix to an operator, with the same
/// layout rules as apply_channel; no validity checks.
Matrix apply_choi(const Matrix& choi, long out_dim, long in_dim, const Matrix& m,
                  long rest_dim);

/// Positive operator-valued measure on a layout.
class Povm {
 public:
  Povm(SystemLayout layout, std::vector<Matrix> elements, const Tolerances& tol = {});

  /// Rank-one projectors onto the computational basis.
  static Povm computational(const SystemLayout& layout);
  /// Seeded random POVM with k elements: S^{-1/2} G_i G_i^dag S^{-1/2} for
  /// Ginibre G_i and S = sum_i G_i G_i^dag.
  static Povm random(const SystemLayout& layout, int k, std::uint64_t seed);

  const SystemLayout& layout() const { return layout_; }
  const std::vector<Matrix>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

  /// A -> X, rho -> sum_x Tr[Lambda^x rho] |x><x|.
  QuantumChannel measurement_channel(const std::string& x_label) const;

 private:
  SystemLayout layout_;
  std::vector<Matrix> elements_;
};

}  // namespace qdecon
