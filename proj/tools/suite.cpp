// Invariant corpus for `qdecon suite`: a small seeded sample of every family,
// each reduced to one worst-case number and one check.

#include <algorithm>
#include <cmath>
#include <complex>

#include "commands.hpp"
#include "qdecon/classical.hpp"
#include "qdecon/measures.hpp"
#include "qdecon/recovery.hpp"
#include "qdecon/squashed.hpp"
#include "qdecon/unitaries.hpp"
#include "state_io.hpp"

namespace qdecon::cli {

namespace {

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t family, std::uint64_t i) {
  // splitmix64 of a packed triple: independent streams per family and case.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + family * 0xBF58476D1CE4E5B9ULL + i;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SystemLayout abe(int da, int db, int de) { return SystemLayout({"A", "B", "E"}, {da, db, de}); }

double ssa_chain(std::uint64_t seed) {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int db = i % 2 ? 3 : 2;
    const auto s = random_mixed_state(abe(2, db, 2), sub_seed(seed, 1, i));
    worst = std::max(worst, -cqmi(s, {"A"}, {"B"}, {"E"}));
    const auto t = random_mixed_state(SystemLayout({"A1", "A2", "B", "E"}, {2, 2, db, 2}),
                                      sub_seed(seed, 2, i));
    worst = std::max(worst, chain_rule_check(t, {{"A1"}, {"A2"}}, {"B"}, {"E"}));
  }
  return worst;
}

double one_design(std::uint64_t seed) {
  double worst = 0.0;
  for (int d = 2; d <= 4; ++d) {
    for (int i = 0; i < 5; ++i) {
      const auto s = random_mixed_state(SystemLayout({"A", "B"}, {d, 2}), sub_seed(seed, d, i));
      const auto t = twirl(s, {"A"}, hw_group(d, "A"));
      const auto ref = tensor_product(maximally_mixed(SystemLayout({"A"}, {d})),
                                      marginal(s, {"B"}));
      worst = std::max(worst, max_abs(t.matrix() - ref.matrix()));
    }
  }
  return worst;
}

// Largest violation among: optimizer below Petz, gap above tolerance,
// recoverability bound, -log2 F <= I(A;B|E) (scaled to its own tolerance).
double fr_certification(std::uint64_t seed, const Tolerances& tol) {
  double worst = -1.0;
  for (int i = 0; i < 4; ++i) {
    const auto s = random_mixed_state(abe(2, 2, 2), sub_seed(seed, 3, i));
    FrOptions fo;
    fo.tol_gap = tol.gap;
    const FrResult fr = fidelity_of_recovery(s, {"A"}, {"B"}, {"E"}, fo);
    const double i_abe = cqmi(s, {"A"}, {"B"}, {"E"});
    const double eps = std::clamp(1.0 - fr.value, 0.0, 1.0);
    worst = std::max(worst, (fr.petz_value - fr.value) / 1e-9);
    worst = std::max(worst, fr.gap / tol.gap);
    worst = std::max(worst, (i_abe - continuity_bound_f({1, eps, 2})) / 1e-9);
    worst = std::max(worst, (-std::log2(fr.value) - i_abe) / 1e-4);
  }
  return worst;
}

double fr_tight() {
  const auto s = tensor_product(maximally_entangled("A", "B", 2),
                                maximally_mixed(SystemLayout({"E"}, {2})));
  const FrResult fr = fidelity_of_recovery(s, {"A"}, {"B"}, {"E"});
  return std::max(std::abs(fr.value - 0.25) / 1e-4,
                  std::abs(cqmi(s, {"A"}, {"B"}, {"E"}) - 2.0) / 1e-9);
}

LbProtocol random_lb(std::uint64_t seed) {
  // Interaction on A_1 E_1 A' (all qubits): outputs A1' (kept), A2' (traced), Ehat_1.
  const SystemLayout in({"A_1", "E_1", "A'"}, {2, 2, 2});
  const Isometry u = random_unitary(in, seed);
  Roles r;
  return LbProtocol{r,
                    Isometry::unchecked(in, SystemLayout({"A1'", "A2'", "Ehat_1"}, {2, 2, 2}),
                                        u.matrix()),
                    random_mixed_state(SystemLayout({"A'"}, {2}), seed + 1),
                    {"A2'"},
                    {"A1'"},
                    {"Ehat_1"},
                    std::nullopt};
}

LurProtocol random_lur(std::uint64_t seed) {
  const SystemLayout in({"A_1", "E_1"}, {2, 2});
  std::vector<Isometry> us;
  std::vector<double> p;
  double total = 0.0;
  for (int k = 0; k < 4; ++k) {
    us.push_back(random_unitary(in, seed + k));
    p.push_back(1.0 + k);
    total += p.back();
  }
  for (auto& x : p) x /= total;
  return make_lur(Roles{}, UnitaryEnsemble(p, us));
}

double model_equivalence(std::uint64_t seed) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto rho = random_mixed_state(abe(2, 2, 2), sub_seed(seed, 4, i));
    const LbProtocol lb = random_lb(sub_seed(seed, 5, i));
    const auto w1 = run_lb(lb, rho);
    const auto w2 = run_lur(lur_from_lb(lb), rho);
    const auto w2m = permute_systems(marginal(w2, w1.labels()), w1.labels());
    worst = std::max(worst, max_abs(w1.matrix() - w2m.matrix()) / 1e-10);

    const LurProtocol lur = random_lur(sub_seed(seed, 6, i));
    const auto v1 = run_lur(lur, rho);
    const auto v2 = run_lb(lb_from_lur(lur), rho);
    const auto v2m = permute_systems(marginal(v2, v1.labels()), v1.labels());
    worst = std::max(worst, max_abs(v1.matrix() - v2m.matrix()) / 1e-10);
  }
  return worst;
}

double reductions(std::uint64_t seed) {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto psi = random_pure_state(SystemLayout({"A", "B", "E", "R"}, {2, 2, 2, 2}),
                                       sub_seed(seed, 7, i));
    const Roles roles;
    const auto red = trivial_redistribution(roles, "R", psi, 2);
    const auto rho = marginal(psi, {"A", "B", "E"});
    worst = std::max(worst, (1.0 - verify_redistribution(red, psi)) / 1e-6);
    const auto decon = verify_deconstruction(decon_from_redistribution(red), rho);
    worst = std::max(worst, decon.eps_achieved / 1e-8);
    const auto er = erasure_from_redistribution(red);
    worst = std::max(worst, verify_erasure(er, rho).eps_achieved / 1e-8);
    const auto back = redistribution_from_erasure(er, psi);
    worst = std::max(worst, (1.0 - verify_redistribution(back, psi)) / 1e-6);
  }
  return worst;
}

MultipartiteState classical_side_state(std::uint64_t seed) {
  const auto s0 = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), seed);
  const auto s1 = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), seed + 1);
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 0.4;
  p1(1, 1) = 0.6;
  return MultipartiteState(abe(2, 2, 2), kron(s0.matrix(), p0) + kron(s1.matrix(), p1));
}

double classical_side(std::uint64_t seed) {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto rho = classical_side_state(sub_seed(seed, 8, i));
    for (int n = 1; n <= 2; ++n) {
      Roles roles;
      roles.n = n;
      const auto p = classical_side_deconstruction(rho, roles);
      const auto rep = verify_deconstruction(p, rho);
      worst = std::max(worst, (1.0 - rep.disturbance_fid) / 1e-12);
      worst = std::max(worst, (1.0 - rep.recoverability_fid) / 1e-8);
      worst = std::max(worst, -converse_gap(rep, rho, roles) / 1e-9);
    }
  }
  return worst;
}

double discord_identity(std::uint64_t seed) {
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const auto s = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), sub_seed(seed, 9, i));
    const Povm povm = Povm::random(SystemLayout({"A"}, {2}), 2 + i % 2, sub_seed(seed, 10, i));
    const double d = discord(s, {"A"}, {"B"}, povm);
    const auto dil = dilated_state(s, "A", "B", povm);
    worst = std::max(worst, std::abs(d - cqmi(dil, {"Ed"}, {"B"}, {"X"})) / 1e-8);
  }
  const auto bell = maximally_entangled("A", "B", 2);
  const double db = discord(bell, {"A"}, {"B"}, Povm::computational(SystemLayout({"A"}, {2})));
  return std::max(worst, std::abs(db - 1.0) / 1e-9);
}

double einselection(std::uint64_t seed) {
  double worst = 0.0;
  const Povm povm = Povm::computational(SystemLayout({"A"}, {2}));
  for (int i = 0; i < 2; ++i) {
    const auto s = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), sub_seed(seed, 11, i));
    const auto dil = dilated_state(s, "A", "B", povm);
    const int ded = dil.layout().dim_of("Ed");
    Roles rd{"Ed", "B", "X", 1};
    const SystemLayout in({"Ed_1", "X_1", "E1'"}, {ded, 2, 1});
    const SystemLayout out({"E2'", "X_1", "E1'"}, {ded, 2, 1});
    const auto cat =
        MultipartiteState::unchecked(SystemLayout({"E1'"}, {1}), Matrix::Identity(1, 1));
    for (double delta : {0.0, 0.05}) {
      // Unitary exp(i delta H) on Ed X before discarding Ed.
      const Isometry h = random_unitary(SystemLayout({"Ed_1", "X_1", "E1'"}, {ded, 2, 1}),
                                        sub_seed(seed, 12, i));
      const HermitianEig eg = eigh(hermitian_part(h.matrix()));
      Vector ph(eg.values.size());
      for (long k = 0; k < ph.size(); ++k) ph[k] = std::polar(1.0, delta * eg.values[k]);
      const Matrix u = eg.vectors * ph.asDiagonal() * eg.vectors.adjoint();
      LbProtocol d{rd, Isometry::unchecked(in, out, u), cat, {"E2'"}, {"E1'"}, {"X_1"},
                   with_preparation(cat, QuantumChannel::identity(SystemLayout({"X_1"}, {2})))};
      const auto dr = verify_deconstruction(d, dil);
      const auto ep = einselection_from_deconstruction(d, povm, "A", *dr.witness);
      const auto er = verify_einselection(ep, s, povm);
      const double bound = delta == 0.0 ? 1e-6 : 9.0 * dr.eps_achieved + 1e-6;
      worst = std::max(worst, er.eps_achieved / bound);
    }
  }
  return worst;
}

double squashed(std::uint64_t seed) {
  const auto bell = maximally_entangled("A", "B", 2);
  Matrix cc = Matrix::Zero(4, 4);
  cc(0, 0) = 0.5;
  cc(3, 3) = 0.5;
  const MultipartiteState cls(SystemLayout({"A", "B"}, {2, 2}), cc);
  const auto prod = tensor_product(random_mixed_state(SystemLayout({"A"}, {2}), seed),
                                   random_mixed_state(SystemLayout({"B"}, {2}), seed + 1));
  double worst = 0.0;
  worst = std::max(worst,
                   std::abs(squashed_upper_bound(bell, {"A"}, {"B"}, 2, 2, seed).value - 1.0) /
                       1e-9);
  worst = std::max(worst, squashed_upper_bound(cls, {"A"}, {"B"}, 2, 2, seed).value / 1e-6);
  worst = std::max(worst,
                   std::abs(squashed_upper_bound(prod, {"A"}, {"B"}, 2, 2, seed).value) / 1e-9);
  return worst;
}

double state_round_trip(std::uint64_t seed) {
  for (int i = 0; i < 10; ++i) {
    const auto s = random_mixed_state(abe(2, 1 + i % 3, 2), sub_seed(seed, 13, i));
    const std::string text = write_state(s);
    if (write_state(parse_state(text)) != text) return 1e300;
  }
  return 0.0;
}

}  // namespace

void run_suite(std::uint64_t seed, const Tolerances& tol, Report& rep) {
  // Each family reports its worst violation normalized by its own
  // tolerance, so a value <= 1 passes.
  const std::pair<const char*, double> families[] = {
      {"ssa_and_chain_rule", ssa_chain(seed) / 1e-9},
      {"one_design_partial_trace", one_design(seed) / 1e-12},
      {"recovery_optimizer_certification", fr_certification(seed, tol)},
      {"recovery_tight_instance", fr_tight()},
      {"model_equivalence", model_equivalence(seed)},
      {"reduction_accounting", reductions(seed)},
      {"classical_side_deconstruction", classical_side(seed)},
      {"discord_identity", discord_identity(seed)},
      {"einselection_inflation", einselection(seed)},
      {"squashed_special_cases", squashed(seed)},
      {"state_file_round_trip", state_round_trip(seed)},
  };
  for (const auto& [name, v] : families) {
    rep.result(name, v, 1.0);
    rep.check_le(name, v, 1.0, 0.0);
  }
}

}  // namespace qdecon::cli
