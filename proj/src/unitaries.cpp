#include "qdecon/unitaries.hpp"

#include <cmath>
#include <numbers>

namespace qdecon {

namespace {

Matrix shift_matrix(long d, long power) {
  Matrix x = Matrix::Zero(d, d);
  for (long i = 0; i < d; ++i) x((i + power) % d, i) = 1.0;
  return x;
}

Matrix phase_matrix(long d, long power) {
  Matrix z = Matrix::Zero(d, d);
  for (long k = 0; k < d; ++k) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>((k * power) % d) /
                       static_cast<double>(d);
    z(k, k) = std::polar(1.0, ang);
  }
  return z;
}

SystemLayout single(int d, const std::string& label) {
  if (d < 1) throw Error("dimension must be >= 1");
  return SystemLayout({label}, {d});
}

}  // namespace

UnitaryEnsemble::UnitaryEnsemble(std::vector<double> probs,
                                 std::vector<Isometry> unitaries, const Tolerances& tol)
    : probs_(std::move(probs)), unitaries_(std::move(unitaries)) {
  if (unitaries_.empty()) throw Error("UnitaryEnsemble: empty ensemble");
  if (probs_.size() != unitaries_.size()) {
    throw Error("UnitaryEnsemble: probability and member counts differ");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error("UnitaryEnsemble: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error("UnitaryEnsemble: probabilities do not sum to 1");
  }
  const SystemLayout& l = unitaries_.front().in_layout();
  const SystemLayout& lo = unitaries_.front().out_layout();
  for (const auto& u : unitaries_) {
    if (!(u.in_layout() == l) || !(u.out_layout() == lo) || !u.is_square()) {
      throw Error("UnitaryEnsemble: members must be unitaries sharing one input and output layout");
    }
    const long d = u.matrix().rows();
    if (max_abs(u.matrix() * u.matrix().adjoint() - Matrix::Identity(d, d)) > tol.iso) {
      throw Error("UnitaryEnsemble: member is not unitary");
    }
  }
}

Isometry hw_shift(int d, const std::string& label) {
  const SystemLayout l = single(d, label);
  return Isometry::unchecked(l, l, shift_matrix(d, 1));
}

Isometry hw_phase(int d, const std::string& label) {
  const SystemLayout l = single(d, label);
  return Isometry::unchecked(l, l, phase_matrix(d, 1));
}

Isometry hw_operator(int d, int j, int k, const std::string& label) {
  const SystemLayout l = single(d, label);
  if (j < 1 || j > d || k < 1 || k > d) throw Error("hw_operator: index out of range");
  return Isometry::unchecked(l, l, shift_matrix(d, j % d) * phase_matrix(d, k % d));
}

UnitaryEnsemble hw_group(const SystemLayout& layout) {
  const long d = layout.total_dim();
  std::vector<double> p;
  std::vector<Isometry> us;
  for (long j = 1; j <= d; ++j) {
    for (long k = 1; k <= d; ++k) {
      p.push_back(1.0 / static_cast<double>(d * d));
      us.push_back(Isometry::unchecked(layout, layout,
                                       shift_matrix(d, j % d) * phase_matrix(d, k % d)));
    }
  }
  return UnitaryEnsemble(std::move(p), std::move(us));
}

UnitaryEnsemble hw_group(int d, const std::string& label) {
  return hw_group(single(d, label));
}

Vector bell_vector(int d, int j, int k) {
  if (j < 1 || j > d || k < 1 || k > d) throw Error("bell_vector: index out of range");
  const Matrix u = shift_matrix(d, j % d) * phase_matrix(d, k % d);
  Vector psi = Vector::Zero(static_cast<long>(d) * d);
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (long i = 0; i < d; ++i) {
    for (long a = 0; a < d; ++a) psi[a * d + i] += w * u(a, i);
  }
  return psi;
}

std::vector<MultipartiteState> bell_basis(int d, const std::string& a,
                                          const std::string& b) {
  const SystemLayout l({a, b}, {d, d});
  std::vector<MultipartiteState> out;
  for (int j = 1; j <= d; ++j) {
    for (int k = 1; k <= d; ++k) out.push_back(pure_state(l, bell_vector(d, j, k)));
  }
  return out;
}

MultipartiteState twirl(const MultipartiteState& s, const Labels& targets,
                        const UnitaryEnsemble& ens) {
  if (!ens.in_place()) throw Error("twirl: ensemble must act in place");
  if (targets.size() != ens.layout().size()) {
    throw Error("twirl: targets do not match ensemble layout");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (s.layout().dim_of(targets[i]) != ens.layout().dims()[i]) {
      throw Error("twirl: dimension mismatch on '" + targets[i] + "'");
    }
  }
  const SystemLayout rest = s.layout().without(targets);
  Labels front = targets;
  front.insert(front.end(), rest.labels().begin(), rest.labels().end());
  const Matrix m = permute_matrix(s.matrix(), s.layout(), front);
  const long dt = ens.layout().total_dim();
  const long dr = rest.total_dim();
  Matrix acc = Matrix::Zero(m.rows(), m.cols());
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const Matrix& u = ens.unitaries()[i].matrix();
    // (U (x) I) m (U (x) I)^dag, blockwise over the rest index.
    Matrix tmp(m.rows(), m.cols());
    for (long a = 0; a < dt; ++a) {
      for (long c = 0; c < dt; ++c) {
        Matrix blk = Matrix::Zero(dr, dr);
        for (long b = 0; b < dt; ++b) {
          if (u(a, b) == Complex(0.0)) continue;
          blk += u(a, b) * m.block(b * dr, c * dr, dr, dr);
        }
        tmp.block(a * dr, c * dr, dr, dr) = blk;
      }
    }
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (long a = 0; a < dt; ++a) {
      for (long c = 0; c < dt; ++c) {
        Matrix blk = Matrix::Zero(dr, dr);
        for (long b = 0; b < dt; ++b) {
          if (u(c, b) == Complex(0.0)) continue;
          blk += std::conj(u(c, b)) * tmp.block(a * dr, b * dr, dr, dr);
        }
        out.block(a * dr, c * dr, dr, dr) = blk;
      }
    }
    acc += ens.probs()[i] * out;
  }
  SystemLayout front_layout = s.layout().select(front);
  return permute_systems(MultipartiteState::unchecked(front_layout, acc), s.labels());
}

Isometry controlled_unitary(const std::vector<std::pair<Matrix, Isometry>>& controls,
                            const SystemLayout& control, const Tolerances& tol) {
  if (controls.empty()) throw Error("controlled_unitary: no controls");
  const long dc = control.total_dim();
  const SystemLayout& tl = controls.front().second.in_layout();
  const long dt = tl.total_dim();
  Matrix sum = Matrix::Zero(dc, dc);
  for (std::size_t a = 0; a < controls.size(); ++a) {
    const Matrix& p = controls[a].first;
    const Isometry& u = controls[a].second;
    if (p.rows() != dc || p.cols() != dc) {
      throw Error("controlled_unitary: projector shape mismatch");
    }
    if (!u.in_place() || !(u.in_layout() == tl)) {
      throw Error("controlled_unitary: controlled operators must share one layout");
    }
    for (std::size_t b = 0; b < controls.size(); ++b) {
      const Matrix pq = p * controls[b].first;
      const Matrix expect = a == b ? p : Matrix::Zero(dc, dc);
      if (max_abs(pq - expect) > tol.iso) {
        throw Error("controlled_unitary: control projectors are not orthonormal");
      }
    }
    sum += p;
  }
  if (max_abs(sum - Matrix::Identity(dc, dc)) > tol.iso) {
    throw Error("controlled_unitary: control projectors do not resolve the identity");
  }
  Matrix big = Matrix::Zero(dc * dt, dc * dt);
  for (const auto& [p, u] : controls) big += kron(p, u.matrix());
  const SystemLayout l = control.concat(tl);
  return Isometry(l, l, std::move(big), tol);
}

Isometry bell_controlled_shift(int d, const std::string& s, const std::string& t,
                               const std::string& m) {
  const SystemLayout control({s, t}, {d, d});
  const int dm = d * d;
  std::vector<std::pair<Matrix, Isometry>> controls;
  const SystemLayout ml({m}, {dm});
  for (int j = 1; j <= d; ++j) {
    for (int k = 1; k <= d; ++k) {
      const Vector v = bell_vector(d, j, k);
      controls.emplace_back(v * v.adjoint(),
                            Isometry::unchecked(ml, ml, shift_matrix(dm, ((j - 1) * d + k) % dm)));
    }
  }
  return controlled_unitary(controls, control);
}

}  // namespace qdecon
