#include "qdecon/channel.hpp"

#include <cmath>
#include <random>

namespace qdecon {

namespace {

void check_choi(const SystemLayout& in, const SystemLayout& out, const Matrix& choi) {
  const long n = in.total_dim() * out.total_dim();
  if (choi.rows() != n || choi.cols() != n) {
    throw Error("QuantumChannel: Choi matrix shape does not match layouts");
  }
}

}  // namespace

Matrix choi_output_trace(const Matrix& choi, long out_dim, long in_dim) {
  Matrix s = Matrix::Zero(in_dim, in_dim);
  for (long o = 0; o < out_dim; ++o) {
    s += choi.block(o * in_dim, o * in_dim, in_dim, in_dim);
  }
  return s;
}

QuantumChannel::QuantumChannel(SystemLayout in, SystemLayout out, Matrix choi,
                               const Tolerances& tol)
    : in_(std::move(in)), out_(std::move(out)), choi_(std::move(choi)) {
  check_choi(in_, out_, choi_);
  if (!choi_.allFinite()) throw Error("QuantumChannel: non-finite entries");
  if (hermiticity_defect(choi_) > tol.herm) {
    throw Error("QuantumChannel: Choi matrix is not Hermitian");
  }
  choi_ = hermitian_part(choi_);
  const double lo = eigh(choi_).values.minCoeff();
  if (lo < -tol.psd) {
    throw Error("QuantumChannel: Choi matrix is not positive (min eigenvalue " +
                std::to_string(lo) + ")");
  }
  const long din = in_.total_dim();
  const Matrix s = choi_output_trace(choi_, out_.total_dim(), din);
  if (max_abs(s - Matrix::Identity(din, din)) > tol.tp) {
    throw Error("QuantumChannel: map is not trace preserving");
  }
}

QuantumChannel::QuantumChannel(Trusted, SystemLayout in, SystemLayout out, Matrix choi)
    : in_(std::move(in)), out_(std::move(out)), choi_(std::move(choi)) {}

QuantumChannel QuantumChannel::unchecked(SystemLayout in, SystemLayout out,
                                         Matrix choi) {
  check_choi(in, out, choi);
  Matrix h = hermitian_part(choi);
  return QuantumChannel(Trusted{}, std::move(in), std::move(out), std::move(h));
}

QuantumChannel QuantumChannel::identity(const SystemLayout& layout) {
  const long d = layout.total_dim();
  return from_isometry(Isometry::unchecked(layout, layout, Matrix::Identity(d, d)));
}

QuantumChannel QuantumChannel::from_kraus(SystemLayout in, SystemLayout out,
                                          const std::vector<Matrix>& kraus,
                                          const Tolerances& tol) {
  const long din = in.total_dim();
  const long dout = out.total_dim();
  Matrix j = Matrix::Zero(din * dout, din * dout);
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != din) {
      throw Error("QuantumChannel::from_kraus: Kraus operator shape mismatch");
    }
    // |K>> = sum_t K|t> (x) |t>, index o*din + t.
    Vector v(din * dout);
    for (long o = 0; o < dout; ++o) {
      for (long t = 0; t < din; ++t) v[o * din + t] = k(o, t);
    }
    j.noalias() += v * v.adjoint();
  }
  return QuantumChannel(std::move(in), std::move(out), std::move(j), tol);
}

QuantumChannel QuantumChannel::from_isometry(const Isometry& v) {
  const long din = v.in_layout().total_dim();
  const long dout = v.out_layout().total_dim();
  Vector w(din * dout);
  for (long o = 0; o < dout; ++o) {
    for (long t = 0; t < din; ++t) w[o * din + t] = v.matrix()(o, t);
  }
  return unchecked(v.in_layout(), v.out_layout(), w * w.adjoint());
}

QuantumChannel QuantumChannel::replacement(const SystemLayout& in,
                                           const MultipartiteState& sigma) {
  const long din = in.total_dim();
  return unchecked(in, sigma.layout(), kron(sigma.matrix(), Matrix::Identity(din, din)));
}

QuantumChannel with_preparation(const MultipartiteState& sigma, const QuantumChannel& ch) {
  return QuantumChannel::unchecked(ch.in_layout(), sigma.layout().concat(ch.out_layout()),
                                   kron(sigma.matrix(), ch.choi()));
}

QuantumChannel permute_outputs(const QuantumChannel& ch, const Labels& order) {
  Labels in_tmp;
  for (const auto& l : ch.in_layout().labels()) in_tmp.push_back(l + "#in");
  const SystemLayout joint =
      ch.out_layout().concat(SystemLayout(in_tmp, ch.in_layout().dims()));
  Labels full = order;
  full.insert(full.end(), in_tmp.begin(), in_tmp.end());
  return QuantumChannel::unchecked(ch.in_layout(), ch.out_layout().select(order),
                                   permute_matrix(ch.choi(), joint, full));
}

Matrix QuantumChannel::block(long t, long tp) const {
  const long din = in_dim();
  const long dout = out_dim();
  Matrix b(dout, dout);
  for (long o = 0; o < dout; ++o) {
    for (long op = 0; op < dout; ++op) b(o, op) = choi_(o * din + t, op * din + tp);
  }
  return b;
}

std::vector<Matrix> kraus_operators(const QuantumChannel& ch, double tol) {
  const long din = ch.in_dim();
  const long dout = ch.out_dim();
  const HermitianEig e = eigh(ch.choi());
  std::vector<Matrix> out;
  for (Eigen::Index i = e.values.size(); i-- > 0;) {
    if (e.values[i] <= tol) break;
    const double w = std::sqrt(e.values[i]);
    Matrix k(dout, din);
    for (long o = 0; o < dout; ++o) {
      for (long t = 0; t < din; ++t) k(o, t) = w * e.vectors(o * din + t, i);
    }
    out.push_back(std::move(k));
  }
  return out;
}

QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
  if (!(second.in_layout() == first.out_layout())) {
    throw Error("compose: channel layouts do not chain");
  }
  const long din = first.in_dim();
  const long dmid = first.out_dim();
  const long dout = second.out_dim();
  // Apply `second` to the output half of first's Choi matrix.
  Matrix j = apply_choi(second.choi(), dout, dmid, first.choi(), din);
  return QuantumChannel::unchecked(first.in_layout(), second.out_layout(), std::move(j));
}

Matrix apply_choi(const Matrix& choi, long out_dim, long in_dim, const Matrix& m,
                  long rest_dim) {
  const long dr = rest_dim;
  Matrix jr(out_dim * out_dim, in_dim * in_dim);
  for (long o = 0; o < out_dim; ++o) {
    for (long op = 0; op < out_dim; ++op) {
      for (long t = 0; t < in_dim; ++t) {
        for (long tp = 0; tp < in_dim; ++tp) {
          jr(o * out_dim + op, t * in_dim + tp) = choi(o * in_dim + t, op * in_dim + tp);
        }
      }
    }
  }
  Matrix mr(in_dim * in_dim, dr * dr);
  for (long t = 0; t < in_dim; ++t) {
    for (long tp = 0; tp < in_dim; ++tp) {
      for (long r = 0; r < dr; ++r) {
        for (long rp = 0; rp < dr; ++rp) {
          mr(t * in_dim + tp, r * dr + rp) = m(t * dr + r, tp * dr + rp);
        }
      }
    }
  }
  const Matrix prod = jr * mr;
  Matrix out(out_dim * dr, out_dim * dr);
  for (long o = 0; o < out_dim; ++o) {
    for (long op = 0; op < out_dim; ++op) {
      for (long r = 0; r < dr; ++r) {
        for (long rp = 0; rp < dr; ++rp) {
          out(o * dr + r, op * dr + rp) = prod(o * out_dim + op, r * dr + rp);
        }
      }
    }
  }
  return out;
}

MultipartiteState apply_channel(const QuantumChannel& ch, const MultipartiteState& s,
                                const Labels& targets) {
  if (targets.size() != ch.in_layout().size()) {
    throw Error("apply_channel: targets do not match channel input");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (s.layout().dim_of(targets[i]) != ch.in_layout().dims()[i]) {
      throw Error("apply_channel: dimension mismatch on '" + targets[i] + "'");
    }
  }
  const SystemLayout rest = s.layout().without(targets);
  Labels front = targets;
  front.insert(front.end(), rest.labels().begin(), rest.labels().end());
  const Matrix m = permute_matrix(s.matrix(), s.layout(), front);
  Matrix out = apply_choi(ch.choi(), ch.out_dim(), ch.in_dim(), m, rest.total_dim());

  // Output labels replacing the targets; identical labels keep their places.
  const Labels& out_labels = ch.out_layout().labels();
  const SystemLayout out_front = ch.out_layout().concat(rest);
  const Labels order = output_order(s.layout(), targets, out_labels);
  return permute_systems(MultipartiteState::unchecked(out_front, std::move(out)), order);
}

Povm::Povm(SystemLayout layout, std::vector<Matrix> elements, const Tolerances& tol)
    : layout_(std::move(layout)), elements_(std::move(elements)) {
  const long d = layout_.total_dim();
  if (elements_.empty()) throw Error("Povm: no elements");
  Matrix sum = Matrix::Zero(d, d);
  for (auto& e : elements_) {
    if (e.rows() != d || e.cols() != d) throw Error("Povm: element shape mismatch");
    if (hermiticity_defect(e) > tol.herm) throw Error("Povm: element is not Hermitian");
    e = hermitian_part(e);
    if (eigh(e).values.minCoeff() < -tol.psd) {
      throw Error("Povm: element is not positive");
    }
    sum += e;
  }
  if (max_abs(sum - Matrix::Identity(d, d)) > tol.tp) {
    throw Error("Povm: elements do not sum to the identity");
  }
}

Povm Povm::computational(const SystemLayout& layout) {
  const long d = layout.total_dim();
  std::vector<Matrix> el;
  for (long x = 0; x < d; ++x) {
    Matrix p = Matrix::Zero(d, d);
    p(x, x) = 1.0;
    el.push_back(std::move(p));
  }
  return Povm(layout, std::move(el));
}

QuantumChannel Povm::measurement_channel(const std::string& x_label) const {
  const long d = layout_.total_dim();
  const long nx = static_cast<long>(elements_.size());
  Matrix j = Matrix::Zero(nx * d, nx * d);
  for (long x = 0; x < nx; ++x) {
    j.block(x * d, x * d, d, d) = elements_[x].transpose();
  }
  return QuantumChannel::unchecked(layout_, SystemLayout({x_label}, {static_cast<int>(nx)}),
                                   std::move(j));
}

Povm Povm::random(const SystemLayout& layout, int k, std::uint64_t seed) {
  if (k < 1) throw Error("Povm::random: need at least one element");
  const long d = layout.total_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Matrix> pos;
  Matrix sum = Matrix::Zero(d, d);
  for (int i = 0; i < k; ++i) {
    Matrix g(d, d);
    for (long c = 0; c < d; ++c) {
      for (long r = 0; r < d; ++r) g(r, c) = Complex(nd(rng), nd(rng));
    }
    pos.push_back(g * g.adjoint());
    sum += pos.back();
  }
  const Matrix inv_sqrt = hermitian_fn(sum, [](double x) { return 1.0 / std::sqrt(x); },
                                       NullPolicy::Apply);
  for (auto& e : pos) e = hermitian_part(inv_sqrt * e * inv_sqrt);
  return Povm(layout, std::move(pos));
}

}  // namespace qdecon
