#pragma once

#include <vector>

#include "qdecon/channel.hpp"
#include "qdecon/state.hpp"

namespace qdecon {

/// Von Neumann entropy in bits of a density matrix; eigenvalues <= 0 contribute 0.
double entropy_of(const Matrix& rho);
double entropy_of(const RealVector& probs);

/// H(systems) of the reduced state.
double entropy(const MultipartiteState& s, const Labels& systems);
/// H(target | cond) = H(target cond) - H(cond).
double conditional_entropy(const MultipartiteState& s, const Labels& target,
                           const Labels& cond);
double mutual_information(const MultipartiteState& s, const Labels& a, const Labels& b);
/// I(A;B|E) = H(AE) + H(BE) - H(E) - H(ABE).
double cqmi(const MultipartiteState& s, const Labels& a, const Labels& b,
            const Labels& e);

/// |I(A_1..A_n;B|E) - sum_i I(A_i;B|E A_1..A_{i-1})|.
double chain_rule_check(const MultipartiteState& s, const std::vector<Labels>& a_parts,
                        const Labels& b, const Labels& e);

/// F(a, b) = ||sqrt(a) sqrt(b)||_1^2.
double fidelity(const Matrix& a, const Matrix& b);
double fidelity(const MultipartiteState& a, const MultipartiteState& b);
/// ||a - b||_1, in [0, 2].
double trace_distance(const MultipartiteState& a, const MultipartiteState& b);
/// sqrt(1 - F), in [0, 1].
double purified_distance(const MultipartiteState& a, const MultipartiteState& b);

double binary_entropy(double x);

struct BoundParams {
  int n = 1;
  double eps = 0.0;
  int dim_b = 2;
};

/// 2 sqrt(eps) n log2|B| + (1 + sqrt(eps)) h2(sqrt(eps) / (1 + sqrt(eps))).
double continuity_bound_f(const BoundParams& p);
/// Same functional form as continuity_bound_f.
double recoverability_bound_g(const BoundParams& p);

/// I(A;B) - I(X;B) for the outcome register X of `povm` measured on `a`.
double discord(const MultipartiteState& s, const Labels& a, const Labels& b,
               const Povm& povm);

}  // namespace qdecon
