#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qdecon/channel.hpp"
#include "qdecon/state.hpp"

namespace qdecon {

/// Petz recovery channel E -> AE built from the AE and E marginals of `s`.
/// On the kernel of rho_E it prepares the maximally mixed state on AE.
QuantumChannel petz_recovery(const MultipartiteState& s, const Labels& a,
                             const Labels& e, double tol_psd = 1e-12);

/// F(rho_ABE, (id_B (x) R)(rho_BE)) for a channel R: E -> AE.
double recovery_fidelity(const MultipartiteState& s, const Labels& a, const Labels& b,
                         const Labels& e, const QuantumChannel& r);

struct FrOptions {
  int max_iters = 100;
  double tol_gap = 1e-6;
  /// When set, the solver starts from a seeded random recovery channel.
  std::optional<std::uint64_t> seed;
  /// Upper limit on the number of real SDP constraints.
  long max_constraints = 2000;
};

/// Thrown when a recovery problem exceeds FrOptions::max_constraints.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

struct FrResult {
  double value = 0.0;        // F achieved by `witness`
  double upper_bound = 1.0;  // certified upper bound on the optimum
  double gap = 1.0;          // upper_bound - value
  double petz_value = 0.0;
  int iterations = 0;
  bool converged = false;    // gap <= tol_gap
  QuantumChannel witness;
};

/// Maximizes the fidelity of recovery of A from E over channels E -> AE.
/// The returned gap is certified by a repaired dual solution of the SDP.
FrResult fidelity_of_recovery(const MultipartiteState& s, const Labels& a,
                              const Labels& b, const Labels& e,
                              const FrOptions& opts = {});

struct FrCheck {
  double cqmi = 0.0;
  double neg_log_f = 0.0;
  double slack = 0.0;  // cqmi - neg_log_f
  FrResult recovery;
};

FrCheck fr_inequality_check(const MultipartiteState& s, const Labels& a,
                            const Labels& b, const Labels& e, const FrOptions& opts = {});

struct DilationLabels {
  std::string e0 = "E0";
  std::string x = "X";
  std::string ebar = "Ebar";
  std::string etilde = "Etilde";
};

/// Unitary A (x) E0 -> X (x) Ebar (x) Etilde with
/// V|psi>|0> = sum_x |x>_X (sqrt(Lambda^x)|psi>)_Ebar |x>_Etilde.
/// |E0| = |X|^2 so that input and output dimensions agree.
Isometry measurement_dilation(const Povm& povm, const DilationLabels& labels = {});

/// Random CPTP Choi matrix on out (x) in (Ginibre, normalized).
Matrix random_choi(long out_dim, long in_dim, std::uint64_t seed);

}  // namespace qdecon
