#include "qdecon/state.hpp"

#include <random>

#include <algorithm>
#include <cmath>

namespace qdecon {

namespace {

void check_shape(const SystemLayout& layout, const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw Error(std::string(what) + ": matrix is not square");
  if (m.rows() != layout.total_dim()) {
    throw Error(std::string(what) + ": matrix dimension " + std::to_string(m.rows()) +
                " does not match layout dimension " +
                std::to_string(layout.total_dim()));
  }
}

std::vector<std::size_t> positions(const SystemLayout& layout, const Labels& order) {
  std::vector<std::size_t> idx;
  idx.reserve(order.size());
  for (const auto& l : order) {
    auto i = layout.index_of(l);
    if (!i) throw Error("unknown label '" + l + "'");
    idx.push_back(*i);
  }
  return idx;
}

void require_permutation(const SystemLayout& layout, const Labels& order) {
  if (order.size() != layout.size()) {
    throw Error("permutation must list every system exactly once");
  }
  Labels a = order, b = layout.labels();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw Error("permutation must list every system exactly once");
}

}  // namespace

MultipartiteState::MultipartiteState(SystemLayout layout, Matrix rho,
                                     const Tolerances& tol)
    : layout_(std::move(layout)), rho_(std::move(rho)) {
  check_shape(layout_, rho_, "MultipartiteState");
  if (!rho_.allFinite()) throw Error("MultipartiteState: non-finite entries");
  if (hermiticity_defect(rho_) > tol.herm) {
    throw Error("MultipartiteState: matrix is not Hermitian");
  }
  rho_ = hermitian_part(rho_);
  const double tr = rho_.trace().real();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw Error("MultipartiteState: trace " + std::to_string(tr) + " is not 1");
  }
  const HermitianEig e = eigh(rho_);
  const double lo = e.values.minCoeff();
  if (lo < -tol.psd) {
    throw Error("MultipartiteState: negative eigenvalue " + std::to_string(lo));
  }
  if (lo < 0.0) {
    RealVector v = e.values.cwiseMax(0.0);
    v /= v.sum();
    rho_ = hermitian_part(e.vectors * v.cast<Complex>().asDiagonal() *
                          e.vectors.adjoint());
  }
}

MultipartiteState::MultipartiteState(Trusted, SystemLayout layout, Matrix rho)
    : layout_(std::move(layout)), rho_(std::move(rho)) {}

MultipartiteState MultipartiteState::unchecked(SystemLayout layout, Matrix rho) {
  check_shape(layout, rho, "MultipartiteState");
  Matrix h = hermitian_part(rho);
  return MultipartiteState(Trusted{}, std::move(layout), std::move(h));
}

Isometry::Isometry(SystemLayout in, SystemLayout out, Matrix v, const Tolerances& tol)
    : in_(std::move(in)), out_(std::move(out)), v_(std::move(v)) {
  if (v_.rows() != out_.total_dim() || v_.cols() != in_.total_dim()) {
    throw Error("Isometry: matrix shape does not match layouts");
  }
  if (!v_.allFinite()) throw Error("Isometry: non-finite entries");
  const Matrix g = v_.adjoint() * v_;
  if (max_abs(g - Matrix::Identity(g.rows(), g.cols())) > tol.iso) {
    throw Error("Isometry: V^dag V differs from identity");
  }
}

Isometry::Isometry(Trusted, SystemLayout in, SystemLayout out, Matrix v)
    : in_(std::move(in)), out_(std::move(out)), v_(std::move(v)) {}

Isometry Isometry::unchecked(SystemLayout in, SystemLayout out, Matrix v) {
  if (v.rows() != out.total_dim() || v.cols() != in.total_dim()) {
    throw Error("Isometry: matrix shape does not match layouts");
  }
  return Isometry(Trusted{}, std::move(in), std::move(out), std::move(v));
}

Isometry Isometry::adjoint() const {
  if (!is_square()) throw Error("Isometry::adjoint: isometry is not square");
  return Isometry(Trusted{}, out_, in_, v_.adjoint());
}

Isometry identity_isometry(const SystemLayout& layout) {
  const long d = layout.total_dim();
  return Isometry::unchecked(layout, layout, Matrix::Identity(d, d));
}

Isometry compose(const Isometry& second, const Isometry& first) {
  if (!(second.in_layout() == first.out_layout())) {
    throw Error("compose: layouts do not chain");
  }
  return Isometry::unchecked(first.in_layout(), second.out_layout(),
                             second.matrix() * first.matrix());
}

Isometry tensor(const Isometry& a, const Isometry& b) {
  return Isometry::unchecked(a.in_layout().concat(b.in_layout()),
                             a.out_layout().concat(b.out_layout()),
                             kron(a.matrix(), b.matrix()));
}

Matrix permute_matrix(const Matrix& m, const SystemLayout& layout,
                      const Labels& order) {
  require_permutation(layout, order);
  const auto idx = positions(layout, order);
  const auto map = permutation_index_map(layout.dims(), idx);
  const long d = static_cast<long>(map.size());
  Matrix out(d, d);
  for (long j = 0; j < d; ++j) {
    for (long i = 0; i < d; ++i) out(i, j) = m(map[i], map[j]);
  }
  return out;
}

Isometry lift(const Isometry& u, const SystemLayout& full) {
  if (!u.in_place()) throw Error("lift: isometry must act in place");
  const Labels& targets = u.in_layout().labels();
  for (const auto& l : targets) {
    if (full.dim_of(l) != u.in_layout().dim_of(l)) {
      throw Error("lift: dimension mismatch on '" + l + "'");
    }
  }
  const SystemLayout rest = full.without(targets);
  const SystemLayout front = u.in_layout().concat(rest);
  const long dr = rest.total_dim();
  Matrix big = kron(u.matrix(), Matrix::Identity(dr, dr));
  return Isometry::unchecked(full, full, permute_matrix(big, front, full.labels()));
}

Isometry extend(const Isometry& u, const SystemLayout& full) {
  const Labels& targets = u.in_layout().labels();
  for (const auto& l : targets) {
    if (full.dim_of(l) != u.in_layout().dim_of(l)) {
      throw Error("extend: dimension mismatch on '" + l + "'");
    }
  }
  const SystemLayout rest = full.without(targets);
  Labels front = targets;
  front.insert(front.end(), rest.labels().begin(), rest.labels().end());
  const long dr = rest.total_dim();
  const Matrix big = kron(u.matrix(), Matrix::Identity(dr, dr));
  // Column j of `full` sits at column inv_in[j] of `big`.
  const auto map_in = permutation_index_map(full.dims(), positions(full, front));
  std::vector<long> inv_in(map_in.size());
  for (std::size_t i = 0; i < map_in.size(); ++i) inv_in[map_in[i]] = static_cast<long>(i);
  const SystemLayout out_front = u.out_layout().concat(rest);
  const Labels final_order = output_order(full, targets, u.out_layout().labels());
  const auto map_out =
      permutation_index_map(out_front.dims(), positions(out_front, final_order));
  Matrix m(static_cast<long>(map_out.size()), static_cast<long>(inv_in.size()));
  for (long j = 0; j < m.cols(); ++j) {
    for (long i = 0; i < m.rows(); ++i) m(i, j) = big(map_out[i], inv_in[j]);
  }
  return Isometry::unchecked(full, out_front.select(final_order), std::move(m));
}

MultipartiteState tensor_product(const MultipartiteState& a,
                                 const MultipartiteState& b) {
  return MultipartiteState::unchecked(a.layout().concat(b.layout()),
                                      kron(a.matrix(), b.matrix()));
}

MultipartiteState permute_systems(const MultipartiteState& s, const Labels& order) {
  if (order == s.labels()) return s;
  return MultipartiteState::unchecked(
      s.layout().select(order), permute_matrix(s.matrix(), s.layout(), order));
}

MultipartiteState partial_trace(const MultipartiteState& s, const Labels& drop) {
  if (drop.empty()) return s;
  const SystemLayout kept = s.layout().without(drop);
  if (kept.empty()) throw Error("partial_trace: cannot trace out every system");
  if (kept.size() + drop.size() != s.layout().size()) {
    throw Error("partial_trace: repeated label in drop set");
  }
  Labels order = kept.labels();
  order.insert(order.end(), drop.begin(), drop.end());
  const Matrix m = permute_matrix(s.matrix(), s.layout(), order);
  const long dk = kept.total_dim();
  const long dd = s.dim() / dk;
  Matrix out = Matrix::Zero(dk, dk);
  for (long j = 0; j < dk; ++j) {
    for (long i = 0; i < dk; ++i) {
      Complex acc = 0.0;
      for (long k = 0; k < dd; ++k) acc += m(i * dd + k, j * dd + k);
      out(i, j) = acc;
    }
  }
  return MultipartiteState::unchecked(kept, std::move(out));
}

MultipartiteState marginal(const MultipartiteState& s, const Labels& keep) {
  Labels drop;
  for (const auto& l : s.labels()) {
    if (std::find(keep.begin(), keep.end(), l) == keep.end()) drop.push_back(l);
  }
  for (const auto& l : keep) {
    if (!s.layout().contains(l)) throw Error("unknown label '" + l + "'");
  }
  return permute_systems(partial_trace(s, drop), keep);
}

MultipartiteState relabel(const MultipartiteState& s,
                          const std::map<std::string, std::string>& rename) {
  Labels ls = s.labels();
  for (auto& l : ls) {
    auto it = rename.find(l);
    if (it != rename.end()) l = it->second;
  }
  return MultipartiteState::unchecked(SystemLayout(ls, s.layout().dims()), s.matrix());
}

MultipartiteState apply_on_subsystems(const Isometry& u, const MultipartiteState& s,
                                      const Labels& targets) {
  if (targets != u.in_layout().labels()) {
    throw Error("apply_on_subsystems: targets must match the isometry input labels");
  }
  for (const auto& l : targets) {
    if (s.layout().dim_of(l) != u.in_layout().dim_of(l)) {
      throw Error("apply_on_subsystems: dimension mismatch on '" + l + "'");
    }
  }
  const SystemLayout rest = s.layout().without(targets);
  Labels front = targets;
  front.insert(front.end(), rest.labels().begin(), rest.labels().end());
  const Matrix m = permute_matrix(s.matrix(), s.layout(), front);
  const long dr = rest.total_dim();
  const Matrix big = kron(u.matrix(), Matrix::Identity(dr, dr));
  const Matrix out = big * m * big.adjoint();
  const SystemLayout out_front = u.out_layout().concat(rest);

  const Labels final_order =
      output_order(s.layout(), targets, u.out_layout().labels());
  return permute_systems(MultipartiteState::unchecked(out_front, out), final_order);
}

Labels output_order(const SystemLayout& layout, const Labels& targets,
                    const Labels& out_labels) {
  if (out_labels == targets) return layout.labels();
  const SystemLayout rest = layout.without(targets);
  std::size_t first = layout.size();
  for (const auto& l : targets) first = std::min(first, *layout.index_of(l));
  std::size_t before = 0;
  for (std::size_t i = 0; i < first; ++i) {
    if (std::find(targets.begin(), targets.end(), layout.labels()[i]) == targets.end()) {
      ++before;
    }
  }
  Labels order(rest.labels().begin(), rest.labels().begin() + before);
  order.insert(order.end(), out_labels.begin(), out_labels.end());
  order.insert(order.end(), rest.labels().begin() + before, rest.labels().end());
  return order;
}

long numerical_rank(const Matrix& h, double tol) {
  const HermitianEig e = eigh(h);
  return (e.values.array() > tol).count();
}

MultipartiteState purify(const MultipartiteState& s, const std::string& ref_label,
                         double tol_psd) {
  const HermitianEig e = eigh(s.matrix());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = e.values.size(); i-- > 0;) {
    if (e.values[i] > tol_psd) keep.push_back(i);
  }
  if (keep.empty()) throw Error("purify: state has no support");
  const long r = static_cast<long>(keep.size());
  const long d = s.dim();
  double norm = 0.0;
  for (auto i : keep) norm += e.values[i];
  Vector psi = Vector::Zero(d * r);
  for (long k = 0; k < r; ++k) {
    const double w = std::sqrt(e.values[keep[k]] / norm);
    for (long x = 0; x < d; ++x) psi[x * r + k] = w * e.vectors(x, keep[k]);
  }
  SystemLayout layout = s.layout().concat(SystemLayout({ref_label}, {static_cast<int>(r)}));
  return MultipartiteState::unchecked(std::move(layout), psi * psi.adjoint());
}

Vector pure_vector(const MultipartiteState& s, double tol) {
  const HermitianEig e = eigh(s.matrix());
  const Eigen::Index top = e.values.size() - 1;
  if (e.values[top] < 1.0 - tol) throw Error("pure_vector: state is not pure");
  Vector v = e.vectors.col(top);
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  v *= std::conj(v[arg]) / std::abs(v[arg]);
  return v;
}

MultipartiteState maximally_mixed(const SystemLayout& layout) {
  const long d = layout.total_dim();
  return MultipartiteState::unchecked(layout,
                                      Matrix::Identity(d, d) / static_cast<double>(d));
}

MultipartiteState pure_state(const SystemLayout& layout, const Vector& psi) {
  if (psi.size() != layout.total_dim()) {
    throw Error("pure_state: vector length does not match layout");
  }
  const double n = psi.norm();
  if (!(n > 0.0)) throw Error("pure_state: zero vector");
  const Vector v = psi / n;
  return MultipartiteState::unchecked(layout, v * v.adjoint());
}

MultipartiteState basis_state(const SystemLayout& layout, long index) {
  const long d = layout.total_dim();
  if (index < 0 || index >= d) throw Error("basis_state: index out of range");
  Matrix m = Matrix::Zero(d, d);
  m(index, index) = 1.0;
  return MultipartiteState::unchecked(layout, std::move(m));
}

MultipartiteState maximally_entangled(const std::string& a, const std::string& b,
                                      int d) {
  Vector psi = Vector::Zero(static_cast<long>(d) * d);
  for (int i = 0; i < d; ++i) psi[static_cast<long>(i) * d + i] = 1.0;
  return pure_state(SystemLayout({a, b}, {d, d}), psi);
}

namespace {

Matrix ginibre(long rows, long cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) g(i, j) = Complex(nd(rng), nd(rng));
  }
  return g;
}

}  // namespace

MultipartiteState random_pure_state(const SystemLayout& layout, std::uint64_t seed) {
  Vector v = ginibre(layout.total_dim(), 1, seed).col(0);
  return pure_state(layout, v / v.norm());
}

MultipartiteState random_mixed_state(const SystemLayout& layout, std::uint64_t seed,
                                     long rank) {
  const long d = layout.total_dim();
  if (rank < 0 || rank > d) throw Error("random_mixed_state: rank out of range");
  const Matrix g = ginibre(d, rank == 0 ? d : rank, seed);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return MultipartiteState(layout, hermitian_part(m));
}

Isometry random_unitary(const SystemLayout& layout, std::uint64_t seed) {
  const long d = layout.total_dim();
  Eigen::HouseholderQR<Matrix> qr(ginibre(d, d, seed));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (long i = 0; i < d; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return Isometry(layout, layout, std::move(q));
}

}  // namespace qdecon
