#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdecon/channel.hpp"
#include "qdecon/recovery.hpp"
#include "qdecon/state.hpp"
#include "qdecon/unitaries.hpp"

namespace qdecon {

/// Copy i (1-based) of system `base`: "A_1", "A_2", ...
std::string copy_label(const std::string& base, int i);
Labels copy_labels(const std::string& base, int n);

/// s^{(x) n}; copy i carries the labels of `s` suffixed with "_i", copies in
/// order.
MultipartiteState tensor_power(const MultipartiteState& s, int n);

/// The one-dimensional state with no systems (no catalyst).
MultipartiteState trivial_state();

/// Merges adjacent systems `parts` (in the given order) into one system.
MultipartiteState merge_systems(const MultipartiteState& s, const Labels& parts,
                                const std::string& merged);

/// Single-system roles of the tripartite state rho_ABE and the copy count.
struct Roles {
  std::string a = "A";
  std::string b = "B";
  std::string e = "E";
  int n = 1;
};

/// Local unitary randomizing deconstruction:
/// omega = sum_i p_i U_i (rho^{(x) n} (x) theta) U_i^dag.
///
/// The members act on a subset of A^n A' E^n and may relabel their outputs.
/// `recovered` are the output systems recovered from `side`, and `side` is
/// aligned copy by copy with E^n for the disturbance check.
struct LurProtocol {
  Roles roles;
  UnitaryEnsemble ensemble;
  MultipartiteState catalyst = trivial_state();
  Labels recovered;
  Labels side;
  /// Recovery channel side -> recovered + side checked before the optimizer.
  std::optional<QuantumChannel> witness;

  std::size_t size() const { return ensemble.size(); }
};

/// LUR protocol with in-place members, recovered = A^n A', side = E^n.
LurProtocol make_lur(const Roles& roles, UnitaryEnsemble ensemble,
                     MultipartiteState catalyst = trivial_state());

/// Landauer-Bennett deconstruction: unitary interaction with a catalyst,
/// followed by discarding `traced`. M = |traced|^2.
struct LbProtocol {
  Roles roles;
  Isometry interaction;
  MultipartiteState catalyst = trivial_state();
  Labels traced;
  Labels recovered;
  Labels side;
  std::optional<QuantumChannel> witness;

  long traced_dim() const;
};

/// Throws Error when layouts, roles or label sets are inconsistent.
void validate(const LurProtocol& p);
void validate(const LbProtocol& p);

/// omega on A^n A' B^n E^n (outputs of the members in place of their inputs).
MultipartiteState run_lur(const LurProtocol& p, const MultipartiteState& rho);
/// omega on the non-traced outputs and B^n.
MultipartiteState run_lb(const LbProtocol& p, const MultipartiteState& rho);

struct ConditionReport {
  int n = 1;
  double disturbance_fid = 1.0;
  double recoverability_fid = 1.0;
  std::optional<double> decoupling_fid;    // conditional erasure only
  std::optional<double> faithfulness_fid;  // einselection only
  double eps_achieved = 0.0;               // 1 - min of the required fidelities
  double noise_active_bits = 0.0;          // log2 M
  /// Deconstruction: log2 of the catalyst dimension. Erasure: log2 L.
  double noise_passive_bits = 0.0;
  double recovery_upper_bound = 1.0;       // certified bound on the best recovery
  std::string recovery_method;             // "witness", "optimizer" or "petz"
  std::optional<QuantumChannel> witness;   // recovery channel achieving the value
};

struct VerifyOptions {
  FrOptions fr;
  /// A witness reaching 1 - witness_accept skips the optimizer.
  double witness_accept = 1e-12;
};

ConditionReport verify_deconstruction(const LurProtocol& p, const MultipartiteState& rho,
                                      const VerifyOptions& opts = {});
ConditionReport verify_deconstruction(const LbProtocol& p, const MultipartiteState& rho,
                                      const VerifyOptions& opts = {});

/// LB -> LUR: members V^i_{traced} U with the Heisenberg-Weyl group on the
/// traced systems; the traced systems join `recovered`.
LurProtocol lur_from_lb(const LbProtocol& p);

/// LUR -> LB: ancilla pi_S (x) pi_T (x) sum_i p_i|i><i|_M (x) theta, interaction
/// (Bell-controlled shift on M) o (M-controlled U_i), S traced. When sqrt(M)
/// is not an integer the ensemble is padded with zero-weight members to the
/// next power of four.
LbProtocol lb_from_lur(const LurProtocol& p);

/// Labels used by lb_from_lur for the ancillas S, T and the index register.
struct LbAncillaLabels {
  std::string s = "S_A";
  std::string t = "T_A";
  std::string m = "M_A";
};
LbProtocol lb_from_lur(const LurProtocol& p, const LbAncillaLabels& labels);

/// State redistribution of psi_ABER: sender holds A E, receiver R.
///
/// encoder: unitary A^n E^n A' -> message A0 side, with A' = `ent_in`;
/// decoder: isometry message R' R^n -> a_hat r_hat R0 [junk]; outputs not
/// named in a_hat, r_hat or r0 are discarded.
struct RedistributionProtocol {
  Roles roles;
  std::string r = "R";
  Isometry encoder;
  Isometry decoder;
  Labels ent_in;
  std::string r_prime = "R'";
  Labels ent_out;
  std::string r0 = "R0";
  Labels message;
  Labels side;   // aligned with E^n
  Labels a_hat;  // aligned with A^n
  Labels r_hat;  // aligned with R^n

  long message_dim() const;  // M
  /// log2 L = log2|A'| - log2|A0|.
  double log2_l() const;
};

void validate(const RedistributionProtocol& p);

/// F(xi, psi^{(x) n} (x) Phi_{A0 R0}).
double verify_redistribution(const RedistributionProtocol& p, const MultipartiteState& psi);

/// Sender-transmits-everything protocol: message = A^n, optional entanglement
/// of dimension `ent_dim` passed through unchanged to A0 R0.
RedistributionProtocol trivial_redistribution(const Roles& roles, const std::string& r,
                                              const MultipartiteState& psi,
                                              int ent_dim = 1);

/// Catalyst pi_{A'}, interaction = encoder, traced = message, recovered = A0.
/// The prepare-pi_{A0} channel is attached as witness.
LbProtocol decon_from_redistribution(const RedistributionProtocol& p);

/// Conditional erasure in the LB shape; the catalyst must be maximally mixed.
struct ErasureProtocol {
  LbProtocol lb;
  /// log2 L = 2 (log2|A'| - log2|A1'|).
  double log2_l() const;
};

void validate(const ErasureProtocol& e);

ErasureProtocol erasure_from_redistribution(const RedistributionProtocol& p);

/// Deconstruction conditions plus F(omega, pi_{A1'} (x) omega_{B E}); the
/// recoverability fidelity is that of the prepare-pi channel.
ConditionReport verify_erasure(const ErasureProtocol& e, const MultipartiteState& rho);

/// Uhlmann decoder for the erasure protocol used as an encoder. When the
/// receiver output space is smaller than the purifying space, a junk output
/// "J#uhl" is added and later discarded.
RedistributionProtocol redistribution_from_erasure(const ErasureProtocol& e,
                                                   const MultipartiteState& psi,
                                                   const std::string& r = "R");

/// E-controlled Heisenberg-Weyl twirls on every A copy whose conditional
/// state rho_AB^e is correlated; other copies are left alone. The
/// E-conditioned preparation channel is attached as witness.
LurProtocol classical_side_deconstruction(const MultipartiteState& rho, const Roles& roles);

/// (1/n) log2 M + (f + g)/n - I(A;B|E), with eps from the report.
double converse_gap(const ConditionReport& report, const MultipartiteState& rho,
                    const Roles& roles);

struct RegionCheck {
  bool member = false;
  double margin_1 = 0.0;
  double margin_2 = 0.0;
};

/// Conditional erasure region: R_A >= I(A;B|R), R_A + R_P >= 2 H(A|R).
RegionCheck rate_region_check(const MultipartiteState& psi, const Roles& roles,
                              const std::string& r, double r_active, double r_passive,
                              double tol = 1e-9);

/// Redistribution region: Q >= I(A;B|R)/2, Q + E >= H(A|R).
RegionCheck redistribution_region_check(const MultipartiteState& psi, const Roles& roles,
                                        const std::string& r, double q, double e,
                                        double tol = 1e-9);

/// Measurement dilation with E = Ebar Etilde merged into one system:
/// A E0 -> X E.
Isometry einselection_dilation(const Povm& povm, const std::string& a,
                               const std::string& e0, const std::string& x,
                               const std::string& e);

/// V(rho_AB) on X E B, with the roles of the dilated deconstruction problem
/// being (A -> e, B -> b, E -> x).
MultipartiteState dilated_state(const MultipartiteState& rho_ab, const std::string& a,
                                const std::string& b, const Povm& povm,
                                const std::string& x = "X", const std::string& e = "Ed");

struct EinselectionProtocol {
  std::string a = "A";
  std::string b = "B";
  int n = 1;
  UnitaryEnsemble ensemble;   // in place on A^n A'
  MultipartiteState catalyst = trivial_state();
  QuantumChannel measurement;  // A^n A' -> X^n
  QuantumChannel preparation;  // X^n -> A^n A'
  std::string x = "X";         // outcome copies are x_1 .. x_n
};

/// Einselection simulation from an LB deconstruction of the dilated state.
/// `d.roles` must be (a = E, b = B, e = X) as produced by dilated_state, and
/// `recovery` is a channel X^n -> recovered X^n for the deconstructed state.
EinselectionProtocol einselection_from_deconstruction(const LbProtocol& d,
                                                      const Povm& povm,
                                                      const std::string& a,
                                                      const QuantumChannel& recovery);
/// Same, with `d.witness` as the recovery channel.
EinselectionProtocol einselection_from_deconstruction(const LbProtocol& d,
                                                      const Povm& povm,
                                                      const std::string& a);

/// Identity ensemble, measurement by `povm` on each copy, given preparation.
EinselectionProtocol zero_noise_einselection(const std::string& a, const std::string& b,
                                             const Povm& povm,
                                             const QuantumChannel& preparation_x_to_a);

/// recoverability_fid = F(sigma, P o M(sigma)); faithfulness_fid =
/// F(M(sigma), zeta^{(x) n}).
ConditionReport verify_einselection(const EinselectionProtocol& p,
                                    const MultipartiteState& rho_ab, const Povm& povm);

}  // namespace qdecon
