#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qdecon/state.hpp"

namespace qdecon {

/// Probability-weighted list of unitaries. All members map the same input
/// layout to the same output layout (usually in place).
class UnitaryEnsemble {
 public:
  UnitaryEnsemble(std::vector<double> probs, std::vector<Isometry> unitaries,
                  const Tolerances& tol = {});

  const std::vector<double>& probs() const { return probs_; }
  const std::vector<Isometry>& unitaries() const { return unitaries_; }
  const SystemLayout& layout() const { return unitaries_.front().in_layout(); }
  const SystemLayout& out_layout() const { return unitaries_.front().out_layout(); }
  bool in_place() const { return unitaries_.front().in_place(); }
  std::size_t size() const { return unitaries_.size(); }

 private:
  std::vector<double> probs_;
  std::vector<Isometry> unitaries_;
};

/// X|i> = |i+1 mod d>.
Isometry hw_shift(int d, const std::string& label = "A");
/// Z|k> = exp(2 pi i k / d)|k>.
Isometry hw_phase(int d, const std::string& label = "A");
/// X^j Z^k with j, k in 1..d (j = k = d is the identity).
Isometry hw_operator(int d, int j, int k, const std::string& label = "A");

/// Uniform ensemble of the d^2 operators X^j Z^k, j outer, k inner.
UnitaryEnsemble hw_group(int d, const std::string& label = "A");
/// Same ensemble acting jointly on several systems of total dimension d.
UnitaryEnsemble hw_group(const SystemLayout& layout);

/// (X^j Z^k (x) I)|Phi>.
Vector bell_vector(int d, int j, int k);
/// All d^2 Bell states, j outer, k inner.
std::vector<MultipartiteState> bell_basis(int d, const std::string& a = "A",
                                          const std::string& b = "B");

/// sum_i p_i U_i s U_i^dag on `targets`; the ensemble must act in place.
MultipartiteState twirl(const MultipartiteState& s, const Labels& targets,
                        const UnitaryEnsemble& ens);

/// Controlled unitary sum_c P_c (x) U_c on control (x) targets.
/// The projectors must be an orthonormal resolution of the identity.
Isometry controlled_unitary(const std::vector<std::pair<Matrix, Isometry>>& controls,
                            const SystemLayout& control, const Tolerances& tol = {});

/// sum_{j,k} |Phi^{jk}><Phi^{jk}|_{s,t} (x) X^{(j-1)d+k} on `m` (dim d^2).
Isometry bell_controlled_shift(int d, const std::string& s, const std::string& t,
                               const std::string& m);

}  // namespace qdecon
