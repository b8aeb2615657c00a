// Acceptance run: one PASS/FAIL line per criterion. With no arguments all
// twelve criteria run; otherwise only the listed numbers. The exit code is 1
// when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "qdecon/classical.hpp"
#include "qdecon/measures.hpp"
#include "qdecon/protocols.hpp"
#include "qdecon/recovery.hpp"
#include "qdecon/squashed.hpp"
#include "qdecon/unitaries.hpp"
#include "state_io.hpp"

using namespace qdecon;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  // Records `value rel bound` and folds it into the verdict.
  void le(const std::string& what, double value, double bound) {
    add(what, value, "<=", bound, value <= bound);
  }
  void ge(const std::string& what, double value, double bound) {
    add(what, value, ">=", bound, value >= bound);
  }
  void flag(const std::string& what, bool ok) {
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? " ok" : " FAILED");
    pass = pass && ok;
  }

 private:
  void add(const std::string& what, double value, const char* rel, double bound, bool ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.3g %s %.3g%s", what.c_str(), value, rel, bound,
                  ok ? "" : " FAILED");
    if (!detail.empty()) detail += "; ";
    detail += buf;
    pass = pass && ok;
  }
};

SystemLayout abe(int da, int db, int de) { return SystemLayout({"A", "B", "E"}, {da, db, de}); }

Matrix aligned(const MultipartiteState& s, const MultipartiteState& ref) {
  return permute_systems(marginal(s, ref.labels()), ref.labels()).matrix();
}

// ---------------------------------------------------------------------------

Verdict ssa_chain() {
  Verdict v;
  double worst_cqmi = INFINITY, worst_chain = 0.0;
  for (int i = 0; i < 500; ++i) {
    const auto s = random_mixed_state(abe(2, i % 2 ? 3 : 2, 2), 10000 + i);
    worst_cqmi = std::min(worst_cqmi, cqmi(s, {"A"}, {"B"}, {"E"}));
    // I(A;EB) = I(A;E) + I(A;B|E)
    worst_chain = std::max(worst_chain, chain_rule_check(s, {{"E"}, {"B"}}, {"A"}, {}));
  }
  v.ge("min cqmi", worst_cqmi, -1e-9);
  v.le("max chain residual", worst_chain, 1e-9);
  return v;
}

Verdict one_design() {
  Verdict v;
  double worst = 0.0;
  for (int d = 2; d <= 4; ++d) {
    for (int i = 0; i < 50; ++i) {
      const auto s = random_mixed_state(SystemLayout({"A", "B"}, {d, 2 + i % 2}), 20000 + 100 * d + i);
      const auto t = twirl(s, {"A"}, hw_group(d, "A"));
      const auto ref = tensor_product(maximally_mixed(SystemLayout({"A"}, {d})), marginal(s, {"B"}));
      worst = std::max(worst, max_abs(t.matrix() - ref.matrix()));
    }
  }
  v.le("max entry deviation", worst, 1e-12);
  return v;
}

Verdict counterexample_family() {
  Verdict v;
  const std::pair<int, int> cases[] = {{4, 2}, {6, 2}, {6, 3}, {8, 2}};
  for (const auto& [n, m] : cases) {
    const std::string tag = "(" + std::to_string(n) + "," + std::to_string(m) + ")";
    const auto t = appendixB_triple(n, m);
    v.le(tag + " |I(X;Y|Z)-1|", std::abs(t.fine.cmi() - 1.0), 1e-12);
    const ClassicalRecovery r = classical_for_oracle(t.coarse);
    v.le(tag + " oracle F", r.upper_bound, appendixB_bound(n, m).fid_bound + 1e-9);
    // The noise bound is log2(n-1) at eps = 0, finite and decreasing below 1/2.
    double prev = INFINITY;
    bool consistent = std::abs(appendixB_noise_bound_bits(n, 0.0) - std::log2(n - 1.0)) <= 1e-12;
    for (double eps : {0.0, 0.01, 0.1, 0.3, 0.49}) {
      const double b = appendixB_noise_bound_bits(n, eps);
      const double expect = std::log2(n - 1.0) + std::log2((1.0 - 2.0 * eps) / (1.0 - eps));
      consistent = consistent && std::isfinite(b) && b <= prev && std::abs(b - expect) <= 1e-12;
      prev = b;
    }
    v.flag(tag + " noise bound", consistent);
  }
  return v;
}

Verdict fr_certification() {
  Verdict v;
  const double tol_gap = Tolerances{}.gap;
  double spread = 0.0, below_petz = -INFINITY, bound_excess = -INFINITY, fr_slack = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const auto s = random_mixed_state(abe(2, 2, 2), 30000 + i);
    double lo = 2.0, hi = -1.0, best = 0.0, petz = 0.0;
    for (int r = 0; r < 10; ++r) {
      FrOptions o;
      o.tol_gap = tol_gap;
      o.seed = 40000 + 10 * i + r;
      const FrResult fr = fidelity_of_recovery(s, {"A"}, {"B"}, {"E"}, o);
      lo = std::min(lo, fr.value);
      hi = std::max(hi, fr.value);
      best = std::max(best, fr.value);
      petz = fr.petz_value;
    }
    spread = std::max(spread, hi - lo);
    below_petz = std::max(below_petz, petz - lo);
    const double i_abe = cqmi(s, {"A"}, {"B"}, {"E"});
    const double eps = std::clamp(1.0 - best, 0.0, 1.0);
    bound_excess = std::max(bound_excess, i_abe - continuity_bound_f({1, eps, 2}));
    fr_slack = std::min(fr_slack, i_abe + std::log2(best));
  }
  v.le("restart spread", spread, 2.0 * tol_gap);
  v.le("petz - optimizer", below_petz, 1e-9);
  v.le("cqmi - bound(1-F)", bound_excess, 1e-9);
  v.ge("cqmi + log2 F", fr_slack, -1e-4);
  return v;
}

Verdict fr_tight() {
  Verdict v;
  const auto s = tensor_product(maximally_entangled("A", "B", 2),
                                maximally_mixed(SystemLayout({"E"}, {2})));
  const FrResult fr = fidelity_of_recovery(s, {"A"}, {"B"}, {"E"});
  const double i = cqmi(s, {"A"}, {"B"}, {"E"});
  v.le("|F - 0.25|", std::abs(fr.value - 0.25), 1e-4);
  v.le("|cqmi - 2|", std::abs(i - 2.0), 1e-12);
  v.le("|-log2 F - cqmi|", std::abs(-std::log2(fr.value) - i), 1e-3);
  return v;
}

Verdict model_equivalence() {
  Verdict v;
  double worst_lb = 0.0, worst_lur = 0.0, worst_report = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto rho = random_mixed_state(abe(2, 2, 2), 50000 + i);
    const SystemLayout in({"A_1", "E_1", "A'"}, {2, 2, 2});
    const LbProtocol lb{Roles{},
                        Isometry::unchecked(in, SystemLayout({"A1'", "A2'", "Ehat_1"}, {2, 2, 2}),
                                            random_unitary(in, 51000 + i).matrix()),
                        random_mixed_state(SystemLayout({"A'"}, {2}), 52000 + i),
                        {"A2'"},
                        {"A1'"},
                        {"Ehat_1"},
                        std::nullopt};
    const auto w = run_lb(lb, rho);
    const auto ref = tensor_product(maximally_mixed(SystemLayout({"A2'"}, {2})), w);
    const auto sim = run_lur(lur_from_lb(lb), rho);
    worst_lb = std::max(worst_lb, max_abs(aligned(sim, ref) - ref.matrix()));
  }
  for (int i = 0; i < 20; ++i) {
    const auto rho = random_mixed_state(abe(2, 2, 2), 53000 + i);
    const SystemLayout in({"A_1", "E_1"}, {2, 2});
    std::vector<Isometry> us;
    for (int k = 0; k < 4; ++k) us.push_back(random_unitary(in, 54000 + 4 * i + k));
    const LurProtocol lur = make_lur(Roles{}, UnitaryEnsemble({0.25, 0.25, 0.25, 0.25}, us));
    const LbProtocol lb = lb_from_lur(lur);
    const auto w = run_lur(lur, rho);
    worst_lur = std::max(worst_lur, max_abs(aligned(run_lb(lb, rho), w) - w.matrix()));
    const auto r1 = verify_deconstruction(lur, rho);
    const auto r2 = verify_deconstruction(lb, rho);
    worst_report = std::max({worst_report, std::abs(r1.disturbance_fid - r2.disturbance_fid),
                             std::abs(r1.recoverability_fid - r2.recoverability_fid),
                             std::abs(r1.noise_active_bits - r2.noise_active_bits)});
  }
  v.le("LB->LUR deviation", worst_lb, 1e-10);
  v.le("LUR->LB deviation", worst_lur, 1e-10);
  v.le("report deviation", worst_report, 1e-6);
  return v;
}

Verdict reductions() {
  Verdict v;
  double eps_decon = 0.0, eps_erase = 0.0, uhlmann = 1.0, accounting = 0.0;
  for (int i = 0; i < 6; ++i) {
    const int ent = 1 + i % 2;
    const auto psi = random_pure_state(SystemLayout({"A", "B", "E", "R"}, {2, 2, 2, 2}), 60000 + i);
    const auto rho = marginal(psi, {"A", "B", "E"});
    const auto red = trivial_redistribution(Roles{}, "R", psi, ent);
    const auto dr = verify_deconstruction(decon_from_redistribution(red), rho);
    eps_decon = std::max(eps_decon, dr.eps_achieved);
    const double m = static_cast<double>(red.message_dim());
    accounting = std::max(accounting, std::abs(dr.noise_active_bits - std::log2(m * m)));
    const auto er = erasure_from_redistribution(red);
    const auto rr = verify_erasure(er, rho);
    eps_erase = std::max(eps_erase, rr.eps_achieved);
    accounting = std::max(accounting, std::abs(er.log2_l() - 2.0 * red.log2_l()));
    accounting = std::max(accounting, std::abs(rr.noise_passive_bits - er.log2_l()));
    uhlmann = std::min(uhlmann, verify_redistribution(redistribution_from_erasure(er, psi), psi));
  }
  v.le("deconstruction eps", eps_decon, 1e-8);
  v.le("erasure eps", eps_erase, 1e-8);
  v.le("noise accounting error", accounting, 1e-12);
  v.ge("round-trip fidelity", uhlmann, 1.0 - 1e-6);
  return v;
}

Verdict classical_side() {
  Verdict v;
  double dist = 0.0, recov = 0.0, out_cqmi = 0.0, gap = INFINITY;
  bool witness = true;
  for (int i = 0; i < 20; ++i) {
    const auto s0 = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), 70000 + 2 * i);
    const auto s1 = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), 70001 + 2 * i);
    const double p = 0.1 + 0.04 * i;
    Matrix e0 = Matrix::Zero(2, 2), e1 = Matrix::Zero(2, 2);
    e0(0, 0) = p;
    e1(1, 1) = 1.0 - p;
    const MultipartiteState rho(abe(2, 2, 2), kron(s0.matrix(), e0) + kron(s1.matrix(), e1));
    for (int n = 1; n <= 2; ++n) {
      Roles roles;
      roles.n = n;
      const auto proto = classical_side_deconstruction(rho, roles);
      const auto r = verify_deconstruction(proto, rho);
      dist = std::max(dist, 1.0 - r.disturbance_fid);
      recov = std::max(recov, 1.0 - r.recoverability_fid);
      witness = witness && r.recovery_method == "witness";
      const auto w = run_lur(proto, rho);
      out_cqmi = std::max(out_cqmi, cqmi(w, proto.recovered, copy_labels("B", n), proto.side) / n);
      gap = std::min(gap, converse_gap(r, rho, roles));
    }
  }
  v.le("1 - disturbance fid", dist, 1e-12);
  v.le("1 - recoverability fid", recov, 1e-8);
  v.flag("explicit witness", witness);
  v.le("output cqmi / n", out_cqmi, 1e-8);
  v.ge("converse gap", gap, -1e-9);
  return v;
}

Verdict discord_identity() {
  Verdict v;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto s = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), 80000 + i);
    const Povm povm = Povm::random(SystemLayout({"A"}, {2}), 2 + i % 2, 81000 + i);
    const auto dil = dilated_state(s, "A", "B", povm);
    worst = std::max(worst, std::abs(discord(s, {"A"}, {"B"}, povm) -
                                     cqmi(dil, {"Ed"}, {"B"}, {"X"})));
  }
  const double bell = discord(maximally_entangled("A", "B", 2), {"A"}, {"B"},
                              Povm::computational(SystemLayout({"A"}, {2})));
  v.le("max |discord - I(E;B|X)|", worst, 1e-8);
  v.le("|Bell discord - 1|", std::abs(bell - 1.0), 1e-9);
  return v;
}

Verdict einselection() {
  Verdict v;
  double exact = 0.0, ratio_excess = -INFINITY;
  const Povm povm = Povm::computational(SystemLayout({"A"}, {2}));
  for (int i = 0; i < 10; ++i) {
    const auto s = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), 90000 + i);
    const auto dil = dilated_state(s, "A", "B", povm);
    const int ded = dil.layout().dim_of("Ed");
    const SystemLayout in({"Ed_1", "X_1", "E1'"}, {ded, 2, 1});
    const SystemLayout out({"E2'", "X_1", "E1'"}, {ded, 2, 1});
    const auto cat = MultipartiteState::unchecked(SystemLayout({"E1'"}, {1}), Matrix::Identity(1, 1));
    const HermitianEig eg = eigh(hermitian_part(random_unitary(in, 91000 + i).matrix()));
    for (double delta : {0.0, 0.02, 0.05, 0.1}) {
      // discard Ed after the unitary exp(i delta H) on Ed X
      Vector ph(eg.values.size());
      for (long k = 0; k < ph.size(); ++k) ph[k] = std::polar(1.0, delta * eg.values[k]);
      const LbProtocol d{Roles{"Ed", "B", "X", 1},
                         Isometry::unchecked(in, out, eg.vectors * ph.asDiagonal() * eg.vectors.adjoint()),
                         cat,
                         {"E2'"},
                         {"E1'"},
                         {"X_1"},
                         with_preparation(cat, QuantumChannel::identity(SystemLayout({"X_1"}, {2})))};
      const auto dr = verify_deconstruction(d, dil);
      const auto er = verify_einselection(
          einselection_from_deconstruction(d, povm, "A", *dr.witness), s, povm);
      if (delta == 0.0) {
        exact = std::max(exact, er.eps_achieved);
      } else {
        ratio_excess = std::max(ratio_excess, er.eps_achieved - 9.0 * dr.eps_achieved);
      }
    }
  }
  v.le("exact eps", exact, 1e-6);
  v.le("eps - 9 eps_decon", ratio_excess, 1e-6);
  return v;
}

Verdict squashed() {
  Verdict v;
  const auto bell = maximally_entangled("A", "B", 2);
  Matrix cc = Matrix::Zero(4, 4);
  cc(0, 0) = 0.5;
  cc(3, 3) = 0.5;
  const MultipartiteState cls(SystemLayout({"A", "B"}, {2, 2}), cc);
  const auto prod = tensor_product(random_mixed_state(SystemLayout({"A"}, {2}), 1),
                                   random_mixed_state(SystemLayout({"B"}, {2}), 2));
  v.le("|Bell - 1|", std::abs(squashed_upper_bound(bell, {"A"}, {"B"}, 2, 4, 5).value - 1.0), 1e-9);
  v.le("classical pair", squashed_upper_bound(cls, {"A"}, {"B"}, 2, 4, 5).value, 1e-6);
  v.le("|product|", std::abs(squashed_upper_bound(prod, {"A"}, {"B"}, 2, 4, 5).value), 1e-9);
  return v;
}

Verdict cli_determinism() {
  Verdict v;
  const std::string data = QDECON_TEST_DATA;
  const auto call = [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    cli::run(args, out, err);
    return out.str();
  };
  const std::vector<std::vector<std::string>> commands = {
      {"suite", "--seed", "7"},
      {"squashed", "--state", data + "/bell.qs", "--seed", "3"},
      {"discord", "--state", data + "/mixed_abe.qs", "--povm", "random", "--seed", "5"},
      {"recover", "--state", data + "/mixed_abe.qs", "--a", "A", "--b", "B", "--e", "E"},
  };
  bool same = true;
  for (const auto& c : commands) same = same && call(c) == call(c);
  v.flag("byte-identical reports", same);

  const auto dir = std::filesystem::temp_directory_path() / "qdecon_acceptance_corpus";
  std::filesystem::create_directories(dir);
  bool identical = true;
  for (int i = 0; i < 100; ++i) {
    const SystemLayout l({"A", "B", "E"}, {1 + i % 3, 2, 1 + (i / 3) % 2});
    const auto s = random_mixed_state(l, 95000 + i);
    const auto path = (dir / ("c" + std::to_string(i) + ".qs")).string();
    cli::write_state_file(path, s);
    const auto back = cli::read_state_file(path);
    identical = identical && back.labels() == s.labels() && max_abs(back.matrix() - s.matrix()) == 0.0 &&
                cli::write_state(back) == cli::write_state(s);
  }
  std::filesystem::remove_all(dir);
  v.flag("100-file write/read identity", identical);
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "strong subadditivity and chain rule", 60, ssa_chain},
      {2, "one-design partial trace", 10, one_design},
      {3, "classical counterexample family", 60, counterexample_family},
      {4, "recovery optimizer certification", 600, fr_certification},
      {5, "tight recovery instance", 10, fr_tight},
      {6, "model equivalence", 120, model_equivalence},
      {7, "reduction accounting", 120, reductions},
      {8, "classical side information deconstruction", 120, classical_side},
      {9, "discord identity", 120, discord_identity},
      {10, "einselection inflation", 180, einselection},
      {11, "squashed entanglement special cases", 10, squashed},
      {12, "CLI determinism and round trip", 10, cli_determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  bool ok = true;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.flag(std::string("exception: ") + e.what(), false);
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char timing[96];
    std::snprintf(timing, sizeof timing, "%.2f s (limit %.0f s)", secs, c.limit_s);
    v.flag(timing, secs <= c.limit_s);
    std::printf("criterion %2d %s: %s: %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name,
                v.detail.c_str());
    std::fflush(stdout);
    ok = ok && v.pass;
  }
  return ok ? 0 : 1;
}
