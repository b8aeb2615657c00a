#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdecon/classical.hpp"
#include "qdecon/measures.hpp"
#include "qdecon/protocols.hpp"
#include "qdecon/recovery.hpp"
#include "qdecon/sdp.hpp"
#include "state_io.hpp"

using namespace qdecon;
using doctest::Approx;

namespace {

MultipartiteState fixture(const std::string& name) {
  return cli::read_state_file(std::string(QDECON_TEST_DATA) + "/" + name);
}

MultipartiteState markov_state() {
  Matrix m = Matrix::Zero(8, 8);
  for (int e = 0; e < 2; ++e) {
    const auto a = random_mixed_state(SystemLayout({"A"}, {2}), 40 + e);
    const auto b = random_mixed_state(SystemLayout({"B"}, {2}), 50 + e);
    Matrix pe = Matrix::Zero(2, 2);
    pe(e, e) = e ? 0.65 : 0.35;
    m += kron(kron(a.matrix(), b.matrix()), pe);
  }
  return MultipartiteState(SystemLayout({"A", "B", "E"}, {2, 2, 2}), m);
}

}  // namespace

TEST_CASE("Petz recovery") {
  const auto m = markov_state();
  const auto petz = petz_recovery(m, {"A"}, {"E"});
  CHECK(recovery_fidelity(m, {"A"}, {"B"}, {"E"}, petz) == Approx(1.0).epsilon(1e-9));

  // independent numpy evaluation on the random fixture
  const auto s = fixture("mixed_abe.qs");
  const auto p = petz_recovery(s, {"A"}, {"E"});
  CHECK(recovery_fidelity(s, {"A"}, {"B"}, {"E"}, p) == Approx(0.8571092962028).epsilon(1e-9));
  CHECK_THROWS_AS(petz_recovery(s, {}, {"E"}), Error);
}

TEST_CASE("fidelity of recovery") {
  SUBCASE("product with A") {
    const auto s = tensor_product(random_mixed_state(SystemLayout({"A"}, {2}), 1),
                                  random_mixed_state(SystemLayout({"B", "E"}, {2, 2}), 2));
    const auto fr = fidelity_of_recovery(s, {"A"}, {"B"}, {"E"});
    CHECK(fr.value >= 1.0 - 1e-6);
  }
  SUBCASE("Bell pair with maximally mixed E") {
    const auto s = fixture("bell_times_pi.qs");
    const auto fr = fidelity_of_recovery(s, {"A"}, {"B"}, {"E"});
    CHECK(fr.value == Approx(0.25).epsilon(1e-4));
    CHECK(fr.upper_bound - fr.value <= 1e-6);
    CHECK(recovery_fidelity(s, {"A"}, {"B"}, {"E"}, fr.witness) ==
          Approx(fr.value).epsilon(1e-9));
    const auto chk = fr_inequality_check(s, {"A"}, {"B"}, {"E"});
    CHECK(chk.cqmi == Approx(2.0).epsilon(1e-12));
    CHECK(chk.neg_log_f == Approx(2.0).epsilon(1e-4));
  }
  SUBCASE("random fixture against an independent SDP solve") {
    const auto s = fixture("mixed_abe.qs");
    const auto fr = fidelity_of_recovery(s, {"A"}, {"B"}, {"E"});
    CHECK(fr.value == Approx(0.90178491).epsilon(2e-6));
    CHECK(fr.converged);
    CHECK(fr.value >= fr.petz_value - 1e-9);
    CHECK(cqmi(s, {"A"}, {"B"}, {"E"}) == Approx(0.3991192750089).epsilon(1e-10));
    const auto seeded = fidelity_of_recovery(s, {"A"}, {"B"}, {"E"}, {100, 1e-6, 17});
    CHECK(std::abs(seeded.value - fr.value) <= 2e-6);
  }
  SUBCASE("Markov state") {
    const auto chk = fr_inequality_check(markov_state(), {"A"}, {"B"}, {"E"});
    CHECK(std::abs(chk.cqmi) < 1e-9);
    CHECK(std::abs(chk.neg_log_f) < 1e-5);
  }
  SUBCASE("seeded start that once left the dual iterate singular") {
    const auto s = random_mixed_state(SystemLayout({"A", "B", "E"}, {2, 2, 2}), 30028);
    FrOptions o;
    o.seed = 40282;
    const auto fr = fidelity_of_recovery(s, {"A"}, {"B"}, {"E"}, o);
    CHECK(fr.converged);
    CHECK(std::abs(fr.value - fidelity_of_recovery(s, {"A"}, {"B"}, {"E"}).value) <= 2e-6);
  }
  SUBCASE("size limit") {
    FrOptions o;
    o.max_constraints = 10;
    CHECK_THROWS_AS(fidelity_of_recovery(fixture("mixed_abe.qs"), {"A"}, {"B"}, {"E"}, o),
                    SizeLimitError);
  }
}

TEST_CASE("classical oracle") {
  // X = Z with Y independent: Markov, perfectly recoverable
  ClassicalTriple copy(2, 2, 2, {0.25, 0.0, 0.25, 0.0, 0.0, 0.25, 0.0, 0.25});
  CHECK(std::abs(copy.cmi()) < 1e-12);
  CHECK(classical_for_oracle(copy).value == Approx(1.0).epsilon(1e-9));
  // X = Y xor Z: one bit of CMI, the best guess of X from Z is uniform
  ClassicalTriple xr(2, 2, 2, {0.25, 0.0, 0.0, 0.25, 0.0, 0.25, 0.25, 0.0});
  CHECK(xr.cmi() == Approx(1.0).epsilon(1e-12));
  CHECK(classical_for_oracle(xr).value == Approx(0.5).epsilon(1e-9));
  // Markov X <- Z -> Y
  std::vector<double> mk(8);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        mk[(x * 2 + y) * 2 + z] = 0.5 * (x == z ? 0.8 : 0.2) * (y == z ? 0.7 : 0.3);
  CHECK(classical_for_oracle(ClassicalTriple(2, 2, 2, mk)).value == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("classical counterexample family") {
  // exact optima frozen from an independent convex solve
  const struct {
    int n, m;
    double value;
  } cases[] = {{4, 2, 0.6476030138}, {6, 2, 0.6794112550}, {6, 3, 0.5862741700},
               {8, 2, 0.6932767907}};
  for (const auto& c : cases) {
    const auto t = appendixB_triple(c.n, c.m);
    CHECK(t.fine.cmi() == Approx(1.0).epsilon(1e-12));
    const auto r = classical_for_oracle(t.coarse);
    CHECK(r.value == Approx(c.value).epsilon(1e-8));
    CHECK(r.gap <= 1e-9);
    CHECK(r.upper_bound <= appendixB_bound(c.n, c.m).relaxed_bound + 1e-9);
  }
  CHECK(appendixB_bound(4, 2).fid_bound == Approx(0.6).epsilon(1e-15));
  CHECK(appendixB_bound(4, 4).fid_bound == Approx(0.5).epsilon(1e-15));
  CHECK(appendixB_noise_bound_bits(5, 0.0) == Approx(2.0).epsilon(1e-15));
  CHECK(appendixB_noise_bound_bits(5, 1e-9) == Approx(2.0).epsilon(1e-8));
  CHECK(std::isnan(appendixB_noise_bound_bits(5, 0.5)));
  CHECK_THROWS_AS(appendixB_triple(5, 2), Error);
}

TEST_CASE("measurement dilation") {
  const SystemLayout a({"A"}, {2});
  const auto v = measurement_dilation(Povm::computational(a));
  const Matrix g = v.matrix().adjoint() * v.matrix();
  CHECK(max_abs(g - Matrix::Identity(g.rows(), g.cols())) < 1e-12);
  for (long i = 0; i < 2; ++i) {
    const auto in = tensor_product(basis_state(a, i), basis_state(SystemLayout({"E0"}, {v.in_layout().dims()[1]}), 0));
    const auto out = apply_on_subsystems(v, in, {"A", "E0"});
    CHECK(marginal(out, {"X"}).matrix()(i, i).real() == Approx(1.0).epsilon(1e-12));
  }
  const auto vt = measurement_dilation(Povm(a, {Matrix::Identity(2, 2)}));
  CHECK(vt.out_layout().dim_of("X") == 1);
  const auto vr = measurement_dilation(Povm::random(a, 3, 6));
  const Matrix gr = vr.matrix().adjoint() * vr.matrix();
  CHECK(max_abs(gr - Matrix::Identity(gr.rows(), gr.cols())) < 1e-11);

  // discord equals I(E;B|X) on the dilated state
  const auto s = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), 5);
  const auto povm = Povm::random(a, 3, 7);
  const auto dil = dilated_state(s, "A", "B", povm);
  CHECK(std::abs(discord(s, {"A"}, {"B"}, povm) - cqmi(dil, {"Ed"}, {"B"}, {"X"})) <= 1e-8);
}

TEST_CASE("SDP solver on a small problem") {
  // max Tr(C X) s.t. Tr X = 1, X >= 0: the largest eigenvalue of C
  Matrix c(2, 2);
  c << 1.0, 0.5, 0.5, 2.0;
  SdpProblem p;
  p.block_dims = {2};
  p.objective = {c};
  SdpConstraint tr;
  tr.parts.push_back({0, Matrix::Identity(2, 2), {}});
  tr.rhs = 1.0;
  p.constraints.push_back(tr);
  const auto r = solve_sdp(p);
  CHECK(r.primal_objective == Approx(eigh(c).values.maxCoeff()).epsilon(1e-7));
}
