#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdecon/channel.hpp"
#include "qdecon/recovery.hpp"
#include "qdecon/unitaries.hpp"

using namespace qdecon;

TEST_CASE("Heisenberg-Weyl operators") {
  for (int d = 2; d <= 4; ++d) {
    const Matrix x = hw_shift(d).matrix();
    const Matrix z = hw_phase(d).matrix();
    const Complex w = std::polar(1.0, 2.0 * std::numbers::pi / d);
    CHECK(max_abs(z * x - w * x * z) < 1e-13);
    Matrix xd = Matrix::Identity(d, d);
    for (int i = 0; i < d; ++i) xd = xd * x;
    CHECK(max_abs(xd - Matrix::Identity(d, d)) < 1e-13);
    CHECK(max_abs(hw_operator(d, d, d).matrix() - Matrix::Identity(d, d)) < 1e-13);
  }
  CHECK_THROWS_AS(hw_operator(2, 0, 1), Error);
  CHECK(hw_group(2).size() == 4);
  CHECK(hw_group(3).size() == 9);

  // Hilbert-Schmidt orthogonality of the d^2 members
  const auto g = hw_group(3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const Complex ip = (g.unitaries()[i].matrix().adjoint() * g.unitaries()[j].matrix()).trace();
      CHECK(std::abs(ip - (i == j ? 3.0 : 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("Bell basis") {
  const auto phi = maximally_entangled("A", "B", 2);
  const auto basis = bell_basis(2);
  CHECK(max_abs(basis[3].matrix() - phi.matrix()) < 1e-15);  // j = k = d
  for (int d = 2; d <= 3; ++d) {
    Matrix gram(d * d, d * d);
    for (int a = 0; a < d * d; ++a) {
      for (int b = 0; b < d * d; ++b) {
        gram(a, b) = bell_vector(d, a / d + 1, a % d + 1).dot(bell_vector(d, b / d + 1, b % d + 1));
      }
    }
    CHECK(max_abs(gram - Matrix::Identity(d * d, d * d)) < 1e-12);
    Matrix mix = Matrix::Zero(d * d, d * d);
    for (const auto& s : bell_basis(d)) mix += s.matrix() / static_cast<double>(d * d);
    CHECK(max_abs(mix - Matrix::Identity(d * d, d * d) / static_cast<double>(d * d)) < 1e-14);
  }
}

TEST_CASE("one-design twirl") {
  for (int d = 2; d <= 4; ++d) {
    const auto s = random_mixed_state(SystemLayout({"A", "B"}, {d, 3}), d);
    const auto t = twirl(s, {"A"}, hw_group(d, "A"));
    const auto ref = tensor_product(maximally_mixed(SystemLayout({"A"}, {d})), marginal(s, {"B"}));
    CHECK(max_abs(t.matrix() - ref.matrix()) < 1e-12);
  }
  const auto phi = maximally_entangled("A", "B", 2);
  CHECK(max_abs(twirl(phi, {"A"}, hw_group(2, "A")).matrix() - Matrix::Identity(4, 4) / 4.0) <
        1e-12);
  const auto s = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), 1);
  const UnitaryEnsemble id({1.0}, {identity_isometry(SystemLayout({"A"}, {2}))});
  CHECK(max_abs(twirl(s, {"A"}, id).matrix() - s.matrix()) < 1e-15);
  // twirl on the second system works through the permutation
  const auto tb = twirl(s, {"B"}, hw_group(2, "B"));
  const auto refb = tensor_product(marginal(s, {"A"}), maximally_mixed(SystemLayout({"B"}, {2})));
  CHECK(max_abs(tb.matrix() - refb.matrix()) < 1e-12);
}

TEST_CASE("unitary ensembles") {
  const SystemLayout l({"A"}, {2});
  CHECK_THROWS_AS(UnitaryEnsemble({0.5}, {identity_isometry(l)}), Error);
  CHECK_THROWS_AS(UnitaryEnsemble({}, {}), Error);
  CHECK_THROWS_AS(UnitaryEnsemble({0.5, 0.5}, {identity_isometry(l),
                                               identity_isometry(SystemLayout({"B"}, {2}))}),
                  Error);
  Matrix nu = Matrix::Identity(2, 2);
  nu(0, 0) = 2.0;
  CHECK_THROWS_AS(UnitaryEnsemble({1.0}, {Isometry::unchecked(l, l, nu)}), Error);
}

TEST_CASE("controlled unitaries") {
  const SystemLayout c({"C"}, {2});
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  const auto id = identity_isometry(SystemLayout({"T"}, {2}));
  CHECK(max_abs(controlled_unitary({{p0, id}, {p1, id}}, c).matrix() - Matrix::Identity(4, 4)) <
        1e-15);
  const Isometry x = Isometry::unchecked(SystemLayout({"T"}, {2}), SystemLayout({"T"}, {2}),
                                         hw_shift(2).matrix());
  Matrix cnot = Matrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  CHECK(max_abs(controlled_unitary({{p0, id}, {p1, x}}, c).matrix() - cnot) < 1e-15);
  CHECK_THROWS_AS(controlled_unitary({{p0, id}}, c), Error);  // does not resolve I

  // Bell-controlled shift: |Phi^{jk}> |m> -> |Phi^{jk}> |m + (j-1)d + k>
  const auto u = bell_controlled_shift(2, "S", "T", "M");
  for (int j = 1; j <= 2; ++j) {
    for (int k = 1; k <= 2; ++k) {
      Vector in = Vector::Zero(16);
      in.segment(0, 16) = kron(bell_vector(2, j, k), Vector::Unit(4, 0));
      const Vector out = u.matrix() * in;
      const Vector expect = kron(bell_vector(2, j, k), Vector::Unit(4, ((j - 1) * 2 + k) % 4));
      CHECK((out - expect).norm() < 1e-12);
    }
  }
}

TEST_CASE("channels") {
  const SystemLayout a({"A"}, {2});
  const auto s = random_mixed_state(SystemLayout({"A", "B"}, {2, 2}), 3);
  CHECK(max_abs(apply_channel(QuantumChannel::identity(a), s, {"A"}).matrix() - s.matrix()) <
        1e-12);
  const auto pi = maximally_mixed(a);
  const auto dep = QuantumChannel::replacement(a, pi);
  const auto out = apply_channel(dep, s, {"A"});
  CHECK(max_abs(out.matrix() - tensor_product(pi, marginal(s, {"B"})).matrix()) < 1e-12);
  const auto sig = random_mixed_state(a, 8);
  const auto rep = apply_channel(QuantumChannel::replacement(a, sig), s, {"A"});
  CHECK(max_abs(rep.matrix() - tensor_product(sig, marginal(s, {"B"})).matrix()) < 1e-12);

  // Choi validation
  CHECK_THROWS_AS(QuantumChannel(a, a, Matrix::Identity(4, 4)), Error);  // not TP
  Matrix bad = Matrix::Zero(4, 4);
  bad(0, 0) = bad(3, 3) = 1.0;
  bad(0, 3) = bad(3, 0) = 2.0;
  CHECK_THROWS_AS(QuantumChannel(a, a, bad), Error);  // not CP

  // Kraus round trip and composition
  const auto r = QuantumChannel(a, a, random_choi(2, 2, 4));
  const auto kr = QuantumChannel::from_kraus(a, a, kraus_operators(r));
  CHECK(max_abs(kr.choi() - r.choi()) < 1e-12);
  const auto rr = compose(r, r);
  const auto twice = apply_channel(r, apply_channel(r, s, {"A"}), {"A"});
  CHECK(max_abs(apply_channel(rr, s, {"A"}).matrix() - twice.matrix()) < 1e-12);
}

TEST_CASE("POVMs") {
  const SystemLayout a({"A"}, {2});
  const auto p = Povm::random(a, 3, 1);
  Matrix sum = Matrix::Zero(2, 2);
  for (const auto& e : p.elements()) sum += e;
  CHECK(max_abs(sum - Matrix::Identity(2, 2)) < 1e-12);
  CHECK_THROWS_AS(Povm(a, {Matrix::Identity(2, 2) * 0.5}), Error);
  const auto k0 = basis_state(a, 1);
  const auto x = apply_channel(Povm::computational(a).measurement_channel("X"), k0, {"A"});
  CHECK(std::abs(x.matrix()(1, 1) - 1.0) < 1e-15);
}
