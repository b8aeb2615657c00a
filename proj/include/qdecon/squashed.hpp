#pragma once

#include <cstdint>

#include "qdecon/channel.hpp"
#include "qdecon/state.hpp"

namespace qdecon {

struct SquashedResult {
  double value = 0.0;      // 1/2 I(A;B|E) of the best extension found
  QuantumChannel witness;  // channel from the purifying system to E
  int best_candidate = 0;  // index in evaluation order (structured seeds first)
};

/// Heuristic upper bound on the squashed entanglement of rho_AB.
///
/// Extensions are generated as rho_ABE = (id_AB (x) N_{R->E})(psi_ABR) for a
/// minimal purification psi. Structured seeds (trivial E, dephasing of R into
/// E) are evaluated first, then `restarts` seeded BFGS descents over the
/// Stinespring isometry of N. Ties (within 1e-12) keep the lowest candidate index.
SquashedResult squashed_upper_bound(const MultipartiteState& s, const Labels& a,
                                    const Labels& b, int ext_dim, int restarts,
                                    std::uint64_t seed);

}  // namespace qdecon
