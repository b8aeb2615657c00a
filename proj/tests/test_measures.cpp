#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdecon/classical.hpp"
#include "qdecon/measures.hpp"
#include "qdecon/squashed.hpp"

using namespace qdecon;
using doctest::Approx;

namespace {

MultipartiteState diag_state(const SystemLayout& l, std::vector<double> p) {
  Matrix m = Matrix::Zero(l.total_dim(), l.total_dim());
  for (std::size_t i = 0; i < p.size(); ++i) m(i, i) = p[i];
  return MultipartiteState(l, m);
}

// sum_e p(e) rho_A^e (x) rho_B^e (x) |e><e|
MultipartiteState markov_state(std::uint64_t seed) {
  Matrix m = Matrix::Zero(8, 8);
  const double p[2] = {0.3, 0.7};
  for (int e = 0; e < 2; ++e) {
    const auto a = random_mixed_state(SystemLayout({"A"}, {2}), seed + 2 * e);
    const auto b = random_mixed_state(SystemLayout({"B"}, {2}), seed + 2 * e + 1);
    Matrix pe = Matrix::Zero(2, 2);
    pe(e, e) = p[e];
    m += kron(kron(a.matrix(), b.matrix()), pe);
  }
  return MultipartiteState(SystemLayout({"A", "B", "E"}, {2, 2, 2}), m);
}

}  // namespace

TEST_CASE("entropy") {
  CHECK(entropy(maximally_mixed(SystemLayout({"A"}, {2})), {"A"}) == Approx(1.0).epsilon(1e-12));
  const auto pure = random_pure_state(SystemLayout({"A", "B"}, {2, 3}), 1);
  CHECK(std::abs(entropy(pure, {"A", "B"})) < 1e-9);
  const auto d = diag_state(SystemLayout({"A"}, {2}), {0.25, 0.75});
  CHECK(entropy(d, {"A"}) == Approx(binary_entropy(0.25)).epsilon(1e-14));
  CHECK_THROWS_AS(entropy(d, {}), Error);
}

TEST_CASE("conditional entropy") {
  const auto phi = maximally_entangled("A", "B", 2);
  CHECK(conditional_entropy(phi, {"A"}, {"B"}) == Approx(-1.0).epsilon(1e-12));
  const auto p = tensor_product(random_mixed_state(SystemLayout({"A"}, {2}), 3),
                                random_mixed_state(SystemLayout({"B"}, {3}), 4));
  CHECK(conditional_entropy(p, {"A"}, {"B"}) == Approx(entropy(p, {"A"})).epsilon(1e-12));

  // classical oracle: H(Y|Z) by table summation
  const auto t = appendixB_triple(6, 3).fine;
  CHECK(conditional_entropy(t.to_state(), {"Y"}, {"Z"}) ==
        Approx(t.conditional_entropy_yz()).epsilon(1e-12));
}

TEST_CASE("mutual information") {
  CHECK(mutual_information(maximally_entangled("A", "B", 2), {"A"}, {"B"}) ==
        Approx(2.0).epsilon(1e-12));
  const auto p = tensor_product(random_mixed_state(SystemLayout({"A"}, {2}), 5),
                                random_mixed_state(SystemLayout({"B"}, {2}), 6));
  CHECK(std::abs(mutual_information(p, {"A"}, {"B"})) < 1e-12);
  const auto cc = diag_state(SystemLayout({"A", "B"}, {2, 2}), {0.5, 0, 0, 0.5});
  CHECK(mutual_information(cc, {"A"}, {"B"}) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cqmi") {
  const auto s = tensor_product(maximally_entangled("A", "B", 2),
                                random_mixed_state(SystemLayout({"E"}, {2}), 7));
  CHECK(cqmi(s, {"A"}, {"B"}, {"E"}) == Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(cqmi(markov_state(10), {"A"}, {"B"}, {"E"})) < 1e-9);
  for (auto [n, m] : {std::pair{2, 1}, {4, 2}, {6, 3}}) {
    CHECK(cqmi(appendixB_triple(n, m).fine.to_state(), {"X"}, {"Y"}, {"Z"}) ==
          Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cqmi(s, {"A"}, {"A"}, {"E"}), Error);

  const auto r = random_mixed_state(SystemLayout({"A", "B", "E"}, {2, 2, 2}), 8);
  CHECK(cqmi(r, {"A"}, {"B"}, {"E"}) == Approx(cqmi(r, {"B"}, {"A"}, {"E"})).epsilon(1e-12));
}

TEST_CASE("chain rule") {
  const auto s = random_mixed_state(SystemLayout({"A1", "A2", "B", "E"}, {2, 2, 2, 2}), 12);
  CHECK(chain_rule_check(s, {{"A1"}, {"A2"}}, {"B"}, {"E"}) <= 1e-9);
  CHECK(chain_rule_check(s, {{"A1", "A2"}}, {"B"}, {"E"}) == 0.0);
  const auto p = tensor_product(random_mixed_state(SystemLayout({"A1", "A2"}, {2, 2}), 1),
                                random_mixed_state(SystemLayout({"B", "E"}, {2, 2}), 2));
  CHECK(std::abs(cqmi(p, {"A1", "A2"}, {"B"}, {"E"})) < 1e-12);
  CHECK(chain_rule_check(p, {{"A1"}, {"A2"}}, {"B"}, {"E"}) < 1e-12);
}

TEST_CASE("Araki-Lieb, concavity and dimension bounds") {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const auto s = random_mixed_state(SystemLayout({"A", "B"}, {2, 3}), seed);
    const double ha = entropy(s, {"A"}), hb = entropy(s, {"B"}), hab = entropy(s, {"A", "B"});
    CHECK(hab >= std::abs(ha - hb) - 1e-12);
    CHECK(hab <= ha + hb + 1e-12);
    CHECK(ha <= 1.0 + 1e-12);
    CHECK(hb <= std::log2(3.0) + 1e-12);
    const auto t = random_mixed_state(SystemLayout({"A", "B"}, {2, 3}), seed + 100);
    const MultipartiteState mix(s.layout(), 0.5 * (s.matrix() + t.matrix()));
    CHECK(entropy(mix, {"A", "B"}) >= 0.5 * (hab + entropy(t, {"A", "B"})) - 1e-12);
  }
}

TEST_CASE("fidelity and distances") {
  const auto r = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), 3);
  CHECK(fidelity(r, r) == Approx(1.0).epsilon(1e-12));
  const auto k0 = basis_state(SystemLayout({"A"}, {2}), 0);
  const auto k1 = basis_state(SystemLayout({"A"}, {2}), 1);
  CHECK(std::abs(fidelity(k0, k1)) < 1e-15);
  CHECK(fidelity(maximally_mixed(SystemLayout({"A"}, {2})), k0) == Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(trace_distance(r, r)) < 1e-12);
  CHECK(std::abs(purified_distance(r, r)) < 1e-6);
  CHECK(trace_distance(k0, k1) == Approx(2.0).epsilon(1e-14));
  CHECK(purified_distance(k0, k1) == Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(fidelity(r, k0), Error);
}

TEST_CASE("binary entropy and continuity bounds") {
  CHECK(binary_entropy(0.5) == Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1e-12) < 1e-9);
  CHECK(binary_entropy(0.25) == Approx(0.8112781244591328).epsilon(1e-14));
  CHECK_THROWS_AS(binary_entropy(1.5), Error);

  CHECK(continuity_bound_f({3, 0.0, 2}) == 0.0);
  CHECK(continuity_bound_f({1, 1.0, 2}) == Approx(4.0).epsilon(1e-14));
  CHECK(recoverability_bound_g({1, 1.0, 2}) == Approx(4.0).epsilon(1e-14));
  double prev = 0.0;
  for (double e = 0.0; e <= 1.0; e += 0.01) {
    const double f = continuity_bound_f({2, e, 3});
    CHECK(f >= prev - 1e-15);
    prev = f;
  }
  CHECK_THROWS_AS(continuity_bound_f({0, 0.1, 2}), Error);
}

TEST_CASE("discord") {
  const SystemLayout a({"A"}, {2});
  const auto bell = maximally_entangled("A", "B", 2);
  CHECK(discord(bell, {"A"}, {"B"}, Povm::computational(a)) == Approx(1.0).epsilon(1e-12));
  const auto prod = tensor_product(random_mixed_state(a, 1),
                                   random_mixed_state(SystemLayout({"B"}, {2}), 2));
  CHECK(std::abs(discord(prod, {"A"}, {"B"}, Povm::random(a, 3, 5))) < 1e-12);
  CHECK(std::abs(discord(prod, {"A"}, {"B"}, Povm(a, {Matrix::Identity(2, 2)}))) < 1e-12);
  const auto cc = diag_state(SystemLayout({"A", "B"}, {2, 2}), {0.4, 0, 0, 0.6});
  CHECK(std::abs(discord(cc, {"A"}, {"B"}, Povm::computational(a))) < 1e-12);
  // the trivial POVM keeps no correlation: discord = I(A;B)
  CHECK(discord(cc, {"A"}, {"B"}, Povm(a, {Matrix::Identity(2, 2)})) ==
        Approx(mutual_information(cc, {"A"}, {"B"})).epsilon(1e-12));
  CHECK_THROWS_AS(discord(bell, {"A"}, {"B"}, Povm::computational(SystemLayout({"A"}, {3}))),
                  Error);
}

TEST_CASE("squashed entanglement special cases") {
  const auto bell = maximally_entangled("A", "B", 2);
  for (int ext : {1, 2}) {
    CHECK(squashed_upper_bound(bell, {"A"}, {"B"}, ext, 2, 1).value ==
          Approx(1.0).epsilon(1e-9));
  }
  const auto cc = diag_state(SystemLayout({"A", "B"}, {2, 2}), {0.3, 0, 0, 0.7});
  const auto r = squashed_upper_bound(cc, {"A"}, {"B"}, 2, 2, 1);
  CHECK(r.value <= 1e-6);
  CHECK(r.best_candidate == 1);
  const auto prod = tensor_product(random_mixed_state(SystemLayout({"A"}, {2}), 1),
                                   random_mixed_state(SystemLayout({"B"}, {2}), 2));
  CHECK(std::abs(squashed_upper_bound(prod, {"A"}, {"B"}, 2, 1, 1).value) < 1e-9);

  // upper bound never exceeds half the mutual information; identical seeds agree
  const auto s = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), 4);
  const auto a1 = squashed_upper_bound(s, {"A"}, {"B"}, 2, 3, 9);
  const auto a2 = squashed_upper_bound(s, {"A"}, {"B"}, 2, 3, 9);
  CHECK(a1.value <= 0.5 * mutual_information(s, {"A"}, {"B"}) + 1e-12);
  CHECK(a1.value == a2.value);
}
